#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/graph.hpp"
#include "deepgraph/matrix.hpp"
#include "deepgraph/spectral.hpp"

namespace deepgraph {

// Diffusion times z_1 < ... < z_N, equally spaced in log: z_n = z1 * (zN/z1)^((n-1)/(N-1)).
struct DiffusionSteps {
    std::vector<double> values;

    std::size_t count() const { return values.size(); }
};

inline DiffusionSteps diffusion_steps(double z1, double zN, std::size_t n_steps) {
    if (!(z1 > 0.0) || !(zN > z1)) throw ConfigError("diffusion_steps: need 0 < z1 < zN");
    if (n_steps < 2) throw ConfigError("diffusion_steps: need at least 2 steps");
    DiffusionSteps steps;
    steps.values.resize(n_steps);
    const double ratio = zN / z1;
    for (std::size_t i = 0; i < n_steps; ++i)
        steps.values[i] = z1 * std::pow(ratio, static_cast<double>(i) / static_cast<double>(n_steps - 1));
    steps.values.front() = z1;
    steps.values.back() = zN;
    return steps;
}

// |V| x N matrix of heat retained at each node: H[i][j] = sum_k exp(-lambda_k z_j) phi_k(i)^2.
// top_k > 0 restricts the sum to the top_k smallest eigenvalues; that is an
// approximation (it breaks the z->0 limit H->1) intended for large graphs.
inline Matrix heat_kernel_diag(const SpectralDecomposition& dec, const DiffusionSteps& steps,
                               std::size_t top_k = 0) {
    const std::size_t n = dec.dim();
    const std::size_t n_steps = steps.count();
    const std::size_t k_used = (top_k == 0 || top_k > n) ? n : top_k;
    Matrix h(n, n_steps, 0.0);
    std::vector<double> decay(n_steps);
    for (std::size_t k = 0; k < k_used; ++k) {
        const double lam = dec.eigenvalues[k];
        for (std::size_t j = 0; j < n_steps; ++j) decay[j] = std::exp(-lam * steps.values[j]);
        for (std::size_t i = 0; i < n; ++i) {
            const double phi2 = dec.eigenvectors(i, k) * dec.eigenvectors(i, k);
            if (phi2 == 0.0) continue;
            double* row = h.row_ptr(i);
            for (std::size_t j = 0; j < n_steps; ++j) row[j] += phi2 * decay[j];
        }
    }
    return h;
}

// Per-column mean/sd pooled over every node of every training graph. The
// histogram bin ranges derive from these, so they must be fitted on the
// training split only.
struct DescriptorStats {
    std::vector<double> means;
    std::vector<double> sds;  // population sd, floored at kSdFloor

    static constexpr double kSdFloor = 1e-8;
    std::size_t count() const { return means.size(); }
};

inline DescriptorStats fit_stats(const std::vector<Matrix>& training_hks) {
    if (training_hks.empty()) throw ConfigError("fit_stats: empty training set");
    const std::size_t n_cols = training_hks.front().cols;
    for (const auto& m : training_hks)
        if (m.cols != n_cols) throw ConfigError("fit_stats: column count mismatch");

    DescriptorStats stats;
    stats.means.assign(n_cols, 0.0);
    stats.sds.assign(n_cols, 0.0);
    std::size_t total_rows = 0;
    for (const auto& m : training_hks) {
        total_rows += m.rows;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double* row = m.row_ptr(i);
            for (std::size_t j = 0; j < n_cols; ++j) stats.means[j] += row[j];
        }
    }
    for (std::size_t j = 0; j < n_cols; ++j) stats.means[j] /= static_cast<double>(total_rows);
    for (const auto& m : training_hks) {
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double* row = m.row_ptr(i);
            for (std::size_t j = 0; j < n_cols; ++j) {
                const double dev = row[j] - stats.means[j];
                stats.sds[j] += dev * dev;
            }
        }
    }
    for (std::size_t j = 0; j < n_cols; ++j)
        stats.sds[j] = std::max(std::sqrt(stats.sds[j] / static_cast<double>(total_rows)),
                                DescriptorStats::kSdFloor);
    return stats;
}

// N_B x N histogram of standardized heat values, one probability column per
// diffusion step. Values below -1.2 sd land in the first bin, values at or
// above +1.2 sd in the last, the rest in N_B-2 equal bins on [-1.2, 1.2)
// (half-open on the right). Counts are divided by |V|.
struct GraphDescriptor {
    Matrix bins;  // N_B x N

    std::size_t n_bins() const { return bins.rows; }
    std::size_t n_steps() const { return bins.cols; }
};

constexpr double kClipSd = 1.2;

inline GraphDescriptor histogram_descriptor(const Matrix& hks, const DescriptorStats& stats,
                                            std::size_t n_bins) {
    if (n_bins < 3) throw ConfigError("histogram_descriptor: need at least 3 bins");
    if (stats.count() != hks.cols) throw ConfigError("histogram_descriptor: stats dimension mismatch");
    const std::size_t n_inner = n_bins - 2;
    const double width = 2.0 * kClipSd / static_cast<double>(n_inner);
    GraphDescriptor desc;
    desc.bins = Matrix(n_bins, hks.cols, 0.0);
    const double inv_n = 1.0 / static_cast<double>(hks.rows);
    for (std::size_t j = 0; j < hks.cols; ++j) {
        const double mean = stats.means[j];
        const double inv_sd = 1.0 / stats.sds[j];
        for (std::size_t i = 0; i < hks.rows; ++i) {
            const double v = (hks(i, j) - mean) * inv_sd;
            std::size_t bin;
            if (v < -kClipSd) {
                bin = 0;
            } else if (v >= kClipSd) {
                bin = n_bins - 1;
            } else {
                const auto idx = static_cast<std::size_t>((v + kClipSd) / width);
                bin = 1 + std::min(idx, n_inner - 1);
            }
            desc.bins(bin, j) += inv_n;
        }
    }
    return desc;
}

// Per-pixel mean/sd over the training descriptors. Normalization divides by
// sd + epsilon (not a floor), mirroring how the network inputs are prepared.
struct PixelStats {
    Matrix means;
    Matrix sds;

    static constexpr double kEpsilon = 1e-8;
};

inline PixelStats fit_pixel_stats(const std::vector<GraphDescriptor>& training) {
    if (training.empty()) throw ConfigError("fit_pixel_stats: empty training set");
    const std::size_t rows = training.front().bins.rows;
    const std::size_t cols = training.front().bins.cols;
    PixelStats stats;
    stats.means = Matrix(rows, cols, 0.0);
    stats.sds = Matrix(rows, cols, 0.0);
    const double inv_count = 1.0 / static_cast<double>(training.size());
    for (const auto& d : training) {
        if (!d.bins.same_shape(stats.means)) throw ConfigError("fit_pixel_stats: shape mismatch");
        for (std::size_t i = 0; i < d.bins.data.size(); ++i) stats.means.data[i] += d.bins.data[i];
    }
    for (double& v : stats.means.data) v *= inv_count;
    for (const auto& d : training) {
        for (std::size_t i = 0; i < d.bins.data.size(); ++i) {
            const double dev = d.bins.data[i] - stats.means.data[i];
            stats.sds.data[i] += dev * dev;
        }
    }
    for (double& v : stats.sds.data) v = std::sqrt(v * inv_count);
    return stats;
}

inline Matrix pixel_normalize(const GraphDescriptor& desc, const PixelStats& stats) {
    if (!desc.bins.same_shape(stats.means)) throw ConfigError("pixel_normalize: shape mismatch");
    Matrix out(desc.bins.rows, desc.bins.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (desc.bins.data[i] - stats.means.data[i]) / (stats.sds.data[i] + PixelStats::kEpsilon);
    return out;
}

inline std::vector<Matrix> pixel_normalize(const std::vector<GraphDescriptor>& descriptors,
                                           const PixelStats& stats) {
    std::vector<Matrix> out;
    out.reserve(descriptors.size());
    for (const auto& d : descriptors) out.push_back(pixel_normalize(d, stats));
    return out;
}

// Graph -> normalized Laplacian -> eigensystem -> heat kernel -> histogram.
inline GraphDescriptor compute_descriptor(const Graph& g, const DiffusionSteps& steps,
                                          const DescriptorStats& stats, std::size_t n_bins,
                                          std::size_t top_k = 0) {
    const SpectralDecomposition dec = eig_sym(normalized_laplacian(g));
    const Matrix hks = heat_kernel_diag(dec, steps, top_k);
    return histogram_descriptor(hks, stats, n_bins);
}

inline Matrix graph_hks(const Graph& g, const DiffusionSteps& steps, std::size_t top_k = 0) {
    return heat_kernel_diag(eig_sym(normalized_laplacian(g)), steps, top_k);
}

}  // namespace deepgraph
