#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/matrix.hpp"
#include "deepgraph/rng.hpp"

namespace deepgraph::nn {

// One multiresolution 1-D convolution layer: for every filter size m it runs
// d filters of length m*k over all windows of m consecutive input rows
// (valid convolution, stride 1), applies tanh, and stacks the per-size
// feature vectors row-wise. Output is sum_m:(n-m+1) rows by d columns.
struct MrConvLayer {
    std::vector<std::size_t> filter_sizes;
    std::size_t input_cols = 0;  // k
    std::size_t filters = 0;     // d
    std::vector<Matrix> weights;  // per size: (m*k) x d
    std::vector<Matrix> biases;   // per size: 1 x d

    std::size_t output_rows(std::size_t input_rows) const {
        std::size_t total = 0;
        for (std::size_t m : filter_sizes) {
            if (m < 1 || m > input_rows)
                throw ConfigError("MrConvLayer: filter size " + std::to_string(m) +
                                  " does not fit input with " + std::to_string(input_rows) + " rows");
            total += input_rows - m + 1;
        }
        return total;
    }
};

struct DenseLayer {
    Matrix w;  // in x out
    Matrix b;  // 1 x out
};

enum class ModelKind : std::uint8_t { kDeepGraph = 0, kMlp = 1, kCnn = 2 };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::kDeepGraph: return "deepgraph";
        case ModelKind::kMlp: return "gd-mlp";
        case ModelKind::kCnn: return "gd-cnn";
    }
    return "?";
}

struct ModelConfig {
    ModelKind kind = ModelKind::kDeepGraph;
    std::size_t bins = 64;   // descriptor rows
    std::size_t steps = 64;  // descriptor cols
    std::vector<std::size_t> filter_sizes = {2, 4, 6};
    std::size_t filters1 = 32;
    std::size_t filters2 = 16;
    std::size_t dense_size = 256;
    double dropout1 = 0.5;  // after the first dense layer
    double dropout2 = 0.5;  // after the second dense layer
    bool paper_init = false;
};

// Two-column multiresolution convolutional regressor. Column 0 convolves the
// descriptor with rows = histogram bins; column 1 convolves the transpose
// (rows = diffusion steps). Column feature maps are flattened row-major,
// concatenated, and passed through two tanh dense layers (dropout after each)
// into a single linear output unit. The MLP variant skips the columns and
// flattens the descriptor directly; the CNN variant keeps only column 0.
struct Model {
    ModelConfig cfg;
    std::vector<std::vector<MrConvLayer>> columns;  // per column: two stacked layers
    DenseLayer dense1, dense2, output;

    std::size_t n_columns() const { return columns.size(); }

    // Rows of the input seen by column c.
    std::size_t column_input_rows(std::size_t c) const { return c == 0 ? cfg.bins : cfg.steps; }

    std::size_t flat_features() const { return dense1.w.rows; }

    // Parameters in checkpoint order: per column, per layer, per filter size
    // (weights then bias), then the three dense layers.
    std::vector<const Matrix*> params() const {
        std::vector<const Matrix*> out;
        for (const auto& column : columns)
            for (const auto& layer : column)
                for (std::size_t s = 0; s < layer.filter_sizes.size(); ++s) {
                    out.push_back(&layer.weights[s]);
                    out.push_back(&layer.biases[s]);
                }
        for (const DenseLayer* d : {&dense1, &dense2, &output}) {
            out.push_back(&d->w);
            out.push_back(&d->b);
        }
        return out;
    }
    std::vector<Matrix*> params() {
        std::vector<Matrix*> out;
        for (auto& column : columns)
            for (auto& layer : column)
                for (std::size_t s = 0; s < layer.filter_sizes.size(); ++s) {
                    out.push_back(&layer.weights[s]);
                    out.push_back(&layer.biases[s]);
                }
        for (DenseLayer* d : {&dense1, &dense2, &output}) {
            out.push_back(&d->w);
            out.push_back(&d->b);
        }
        return out;
    }

    // True for entries of params() that are weights (L2-penalized); biases are not.
    std::vector<bool> weight_mask() const {
        std::vector<bool> mask;
        for (const auto& column : columns)
            for (const auto& layer : column)
                for (std::size_t s = 0; s < layer.filter_sizes.size(); ++s) {
                    (void)layer;
                    mask.push_back(true);
                    mask.push_back(false);
                }
        for (int i = 0; i < 3; ++i) {
            mask.push_back(true);
            mask.push_back(false);
        }
        return mask;
    }

    std::vector<std::string> param_names() const {
        std::vector<std::string> names;
        for (std::size_t c = 0; c < columns.size(); ++c)
            for (std::size_t l = 0; l < columns[c].size(); ++l)
                for (std::size_t s = 0; s < columns[c][l].filter_sizes.size(); ++s) {
                    const std::string base = "col" + std::to_string(c) + ".conv" + std::to_string(l + 1) +
                                             ".m" + std::to_string(columns[c][l].filter_sizes[s]);
                    names.push_back(base + ".w");
                    names.push_back(base + ".b");
                }
        for (const char* d : {"dense1", "dense2", "output"}) {
            names.push_back(std::string(d) + ".w");
            names.push_back(std::string(d) + ".b");
        }
        return names;
    }
};

namespace detail {

inline void init_matrix(Matrix& m, Rng& rng, double sd) {
    for (double& v : m.data) v = rng.normal() * sd;
}

inline MrConvLayer make_conv_layer(const ModelConfig& cfg, std::size_t input_cols, std::size_t filters,
                                   Rng& rng) {
    MrConvLayer layer;
    layer.filter_sizes = cfg.filter_sizes;
    layer.input_cols = input_cols;
    layer.filters = filters;
    for (std::size_t m : layer.filter_sizes) {
        Matrix w(m * input_cols, filters);
        const double sd = cfg.paper_init ? 1.0 : 1.0 / std::sqrt(static_cast<double>(m * input_cols));
        init_matrix(w, rng, sd);
        layer.weights.push_back(std::move(w));
        Matrix b(1, filters, 0.0);
        if (cfg.paper_init) init_matrix(b, rng, 1.0);
        layer.biases.push_back(std::move(b));
    }
    return layer;
}

inline DenseLayer make_dense_layer(const ModelConfig& cfg, std::size_t in, std::size_t out, Rng& rng) {
    DenseLayer d;
    d.w = Matrix(in, out);
    const double sd = cfg.paper_init ? 1.0 : 1.0 / std::sqrt(static_cast<double>(in));
    init_matrix(d.w, rng, sd);
    d.b = Matrix(1, out, 0.0);
    if (cfg.paper_init) init_matrix(d.b, rng, 1.0);
    return d;
}

}  // namespace detail

inline Model build_model(const ModelConfig& cfg, Rng& rng) {
    if (cfg.bins < 1 || cfg.steps < 1) throw ConfigError("build_model: empty descriptor shape");
    Model model;
    model.cfg = cfg;
    const std::size_t n_cols = cfg.kind == ModelKind::kDeepGraph ? 2 : (cfg.kind == ModelKind::kCnn ? 1 : 0);
    std::size_t flat = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
        const std::size_t rows0 = c == 0 ? cfg.bins : cfg.steps;
        const std::size_t cols0 = c == 0 ? cfg.steps : cfg.bins;
        std::vector<MrConvLayer> column;
        column.push_back(detail::make_conv_layer(cfg, cols0, cfg.filters1, rng));
        const std::size_t rows1 = column[0].output_rows(rows0);
        column.push_back(detail::make_conv_layer(cfg, cfg.filters1, cfg.filters2, rng));
        const std::size_t rows2 = column[1].output_rows(rows1);
        flat += rows2 * cfg.filters2;
        model.columns.push_back(std::move(column));
    }
    if (n_cols == 0) flat = cfg.bins * cfg.steps;
    model.dense1 = detail::make_dense_layer(cfg, flat, cfg.dense_size, rng);
    model.dense2 = detail::make_dense_layer(cfg, cfg.dense_size, cfg.dense_size, rng);
    model.output = detail::make_dense_layer(cfg, cfg.dense_size, 1, rng);
    return model;
}

// Valid multiresolution convolution of x (n x k) through the layer, tanh
// applied. Windows read the input rows in place; no im2row copy is made.
inline Matrix mrconv_forward(const Matrix& x, const MrConvLayer& layer) {
    if (x.cols != layer.input_cols) throw ConfigError("mrconv_forward: input column mismatch");
    const std::size_t out_rows = layer.output_rows(x.rows);
    Matrix out(out_rows, layer.filters);
    const std::size_t d = layer.filters;
    std::size_t offset = 0;
    for (std::size_t s = 0; s < layer.filter_sizes.size(); ++s) {
        const std::size_t m = layer.filter_sizes[s];
        const std::size_t wlen = m * layer.input_cols;
        const std::size_t seg = x.rows - m + 1;
        const Matrix& w = layer.weights[s];
        const double* bias = layer.biases[s].data.data();
        for (std::size_t i = 0; i < seg; ++i) {
            const double* win = x.data.data() + i * layer.input_cols;
            double* orow = out.row_ptr(offset + i);
            for (std::size_t j = 0; j < d; ++j) orow[j] = bias[j];
            for (std::size_t t = 0; t < wlen; ++t) {
                const double xv = win[t];
                if (xv == 0.0) continue;
                const double* wrow = w.row_ptr(t);
                for (std::size_t j = 0; j < d; ++j) orow[j] += xv * wrow[j];
            }
            for (std::size_t j = 0; j < d; ++j) orow[j] = std::tanh(orow[j]);
        }
        offset += seg;
    }
    return out;
}

// Backward pass matching mrconv_forward. act is the forward output (post
// tanh), d_out the gradient at the output. Accumulates into d_w/d_b; when
// d_x is non-null it must be zeroed to x's shape and receives the input
// gradient.
inline void mrconv_backward(const Matrix& x, const MrConvLayer& layer, const Matrix& act,
                            const Matrix& d_out, std::span<Matrix* const> d_w,
                            std::span<Matrix* const> d_b, Matrix* d_x) {
    const std::size_t d = layer.filters;
    std::vector<double> dz(d);
    std::size_t offset = 0;
    for (std::size_t s = 0; s < layer.filter_sizes.size(); ++s) {
        const std::size_t m = layer.filter_sizes[s];
        const std::size_t wlen = m * layer.input_cols;
        const std::size_t seg = x.rows - m + 1;
        const Matrix& w = layer.weights[s];
        Matrix& gw = *d_w[s];
        double* gb = d_b[s]->data.data();
        for (std::size_t i = 0; i < seg; ++i) {
            const double* arow = act.row_ptr(offset + i);
            const double* drow = d_out.row_ptr(offset + i);
            for (std::size_t j = 0; j < d; ++j) {
                dz[j] = drow[j] * (1.0 - arow[j] * arow[j]);
                gb[j] += dz[j];
            }
            const double* win = x.data.data() + i * layer.input_cols;
            for (std::size_t t = 0; t < wlen; ++t) {
                const double xv = win[t];
                if (xv != 0.0) {
                    double* gwrow = gw.row_ptr(t);
                    for (std::size_t j = 0; j < d; ++j) gwrow[j] += xv * dz[j];
                }
            }
            if (d_x) {
                double* dwin = d_x->data.data() + i * layer.input_cols;
                for (std::size_t t = 0; t < wlen; ++t) {
                    const double* wrow = w.row_ptr(t);
                    double s_acc = 0.0;
                    for (std::size_t j = 0; j < d; ++j) s_acc += wrow[j] * dz[j];
                    dwin[t] += s_acc;
                }
            }
        }
        offset += seg;
    }
}

enum class Mode { kEval, kTrain, kTrainFixedMasks };

// Everything backward needs from a forward pass over one mini-batch.
struct BatchCache {
    struct SampleCache {
        std::vector<Matrix> col_input;                // per column
        std::vector<std::vector<Matrix>> activations; // per column, per layer
    };
    std::vector<SampleCache> samples;
    Matrix phi;                    // batch x flat_features
    Matrix h1, h1d, h2, h2d;       // batch x dense_size (post-tanh / post-dropout)
    Matrix mask1, mask2;           // inverted dropout masks (0 or 1/(1-p))
    std::vector<double> yhat;
};

namespace detail {

inline void dense_forward(const Matrix& x, const DenseLayer& layer, bool tanh_act, Matrix& out) {
    matmul(x, layer.w, out);
    for (std::size_t i = 0; i < out.rows; ++i) {
        double* row = out.row_ptr(i);
        const double* b = layer.b.data.data();
        for (std::size_t j = 0; j < out.cols; ++j) row[j] += b[j];
        if (tanh_act)
            for (std::size_t j = 0; j < out.cols; ++j) row[j] = std::tanh(row[j]);
    }
}

inline void draw_mask(Matrix& mask, std::size_t rows, std::size_t cols, double p, Rng& rng) {
    mask.rows = rows;
    mask.cols = cols;
    mask.data.resize(rows * cols);
    if (p <= 0.0) {
        std::fill(mask.data.begin(), mask.data.end(), 1.0);
        return;
    }
    const double keep_scale = 1.0 / (1.0 - p);
    for (double& v : mask.data) v = rng.bernoulli(p) ? 0.0 : keep_scale;
}

inline void apply_mask(const Matrix& x, const Matrix& mask, Matrix& out) {
    out.rows = x.rows;
    out.cols = x.cols;
    out.data.resize(x.data.size());
    for (std::size_t i = 0; i < x.data.size(); ++i) out.data[i] = x.data[i] * mask.data[i];
}

}  // namespace detail

// Forward pass over a mini-batch of descriptors. In kTrain mode dropout masks
// are drawn from rng (mask1 fully, then mask2); kTrainFixedMasks reuses the
// masks already present in the cache; kEval applies no dropout.
inline std::vector<double> forward_batch(const Model& model, std::span<const Matrix* const> inputs,
                                         Mode mode, Rng* rng, BatchCache& cache) {
    const std::size_t batch = inputs.size();
    if (batch == 0) throw ConfigError("forward_batch: empty batch");
    const std::size_t flat = model.flat_features();
    cache.samples.assign(batch, {});
    cache.phi = Matrix(batch, flat);
    for (std::size_t b = 0; b < batch; ++b) {
        const Matrix& s = *inputs[b];
        if (s.rows != model.cfg.bins || s.cols != model.cfg.steps)
            throw ConfigError("forward_batch: descriptor shape mismatch");
        auto& sc = cache.samples[b];
        double* phi_row = cache.phi.row_ptr(b);
        if (model.n_columns() == 0) {
            std::copy(s.data.begin(), s.data.end(), phi_row);
            continue;
        }
        std::size_t pos = 0;
        for (std::size_t c = 0; c < model.n_columns(); ++c) {
            sc.col_input.push_back(c == 0 ? s : s.transposed());
            sc.activations.emplace_back();
            const Matrix* cur = &sc.col_input.back();
            for (const auto& layer : model.columns[c]) {
                sc.activations[c].push_back(mrconv_forward(*cur, layer));
                cur = &sc.activations[c].back();
            }
            std::copy(cur->data.begin(), cur->data.end(), phi_row + pos);
            pos += cur->data.size();
        }
    }

    detail::dense_forward(cache.phi, model.dense1, true, cache.h1);
    if (mode == Mode::kTrain)
        detail::draw_mask(cache.mask1, batch, model.cfg.dense_size, model.cfg.dropout1, *rng);
    if (mode == Mode::kEval) {
        cache.h1d = cache.h1;
    } else {
        detail::apply_mask(cache.h1, cache.mask1, cache.h1d);
    }

    detail::dense_forward(cache.h1d, model.dense2, true, cache.h2);
    if (mode == Mode::kTrain)
        detail::draw_mask(cache.mask2, batch, model.cfg.dense_size, model.cfg.dropout2, *rng);
    if (mode == Mode::kEval) {
        cache.h2d = cache.h2;
    } else {
        detail::apply_mask(cache.h2, cache.mask2, cache.h2d);
    }

    Matrix out;
    detail::dense_forward(cache.h2d, model.output, false, out);
    cache.yhat.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) cache.yhat[b] = out(b, 0);
    return cache.yhat;
}

// Single-sample prediction. Train mode draws fresh dropout masks from rng;
// eval mode is deterministic.
inline double model_forward(const Model& model, const Matrix& descriptor, Mode mode = Mode::kEval,
                            Rng* rng = nullptr) {
    BatchCache cache;
    const Matrix* ptr = &descriptor;
    return forward_batch(model, std::span<const Matrix* const>(&ptr, 1), mode, rng, cache)[0];
}

// Mean squared error of the data term plus l2 * sum of squared weights
// (biases are not penalized).
inline double l2_penalty(const Model& model, double l2) {
    if (l2 == 0.0) return 0.0;
    double sum = 0.0;
    const auto params = model.params();
    const auto mask = model.weight_mask();
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (!mask[p]) continue;
        for (double v : params[p]->data) sum += v * v;
    }
    return l2 * sum;
}

inline double mse_of(const std::vector<double>& yhat, const std::vector<double>& y) {
    if (yhat.size() != y.size() || y.empty()) throw ConfigError("mse_of: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = yhat[i] - y[i];
        sum += d * d;
    }
    return sum / static_cast<double>(y.size());
}

inline double batch_loss(const Model& model, std::span<const Matrix* const> inputs,
                         const std::vector<double>& targets, double l2, Mode mode, Rng* rng,
                         BatchCache& cache) {
    const auto yhat = forward_batch(model, inputs, mode, rng, cache);
    return mse_of(yhat, targets) + l2_penalty(model, l2);
}

// Gradients of batch_loss with respect to every parameter, in params() order.
// Requires the cache of the matching forward pass. Dropout gradients use the
// cached masks, so the result is deterministic given those masks.
inline void backward_batch(const Model& model, const BatchCache& cache,
                           const std::vector<double>& targets, double l2,
                           std::vector<Matrix>& grads) {
    const std::size_t batch = targets.size();
    if (cache.yhat.size() != batch) throw ConfigError("backward_batch: cache/target size mismatch");
    const auto params = model.params();
    grads.resize(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
        grads[p].rows = params[p]->rows;
        grads[p].cols = params[p]->cols;
        grads[p].data.assign(params[p]->data.size(), 0.0);
    }
    // Gradient tensors share params() order: conv groups first, then dense1,
    // dense2, output as the final six entries.
    const std::size_t gi_dense1 = grads.size() - 6;

    const bool eval_like = cache.mask1.data.empty();
    Matrix dy(batch, 1);
    for (std::size_t b = 0; b < batch; ++b)
        dy(b, 0) = 2.0 * (cache.yhat[b] - targets[b]) / static_cast<double>(batch);

    // output layer
    matmul_at_b(cache.h2d, dy, grads[gi_dense1 + 4]);
    for (std::size_t b = 0; b < batch; ++b) grads[gi_dense1 + 5](0, 0) += dy(b, 0);
    Matrix dh2d;
    matmul_a_bt(dy, model.output.w, dh2d);

    // dropout2 + tanh
    Matrix dz2(batch, model.cfg.dense_size);
    for (std::size_t i = 0; i < dh2d.data.size(); ++i) {
        const double dh2 = eval_like ? dh2d.data[i] : dh2d.data[i] * cache.mask2.data[i];
        const double a = cache.h2.data[i];
        dz2.data[i] = dh2 * (1.0 - a * a);
    }

    // dense2
    matmul_at_b(cache.h1d, dz2, grads[gi_dense1 + 2]);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* row = dz2.row_ptr(b);
        double* gb = grads[gi_dense1 + 3].data.data();
        for (std::size_t j = 0; j < dz2.cols; ++j) gb[j] += row[j];
    }
    Matrix dh1d;
    matmul_a_bt(dz2, model.dense2.w, dh1d);

    // dropout1 + tanh
    Matrix dz1(batch, model.cfg.dense_size);
    for (std::size_t i = 0; i < dh1d.data.size(); ++i) {
        const double dh1 = eval_like ? dh1d.data[i] : dh1d.data[i] * cache.mask1.data[i];
        const double a = cache.h1.data[i];
        dz1.data[i] = dh1 * (1.0 - a * a);
    }

    // dense1
    matmul_at_b(cache.phi, dz1, grads[gi_dense1]);
    for (std::size_t b = 0; b < batch; ++b) {
        const double* row = dz1.row_ptr(b);
        double* gb = grads[gi_dense1 + 1].data.data();
        for (std::size_t j = 0; j < dz1.cols; ++j) gb[j] += row[j];
    }

    if (model.n_columns() > 0) {
        Matrix dphi;
        matmul_a_bt(dz1, model.dense1.w, dphi);
        for (std::size_t b = 0; b < batch; ++b) {
            const auto& sc = cache.samples[b];
            const double* dphi_row = dphi.row_ptr(b);
            std::size_t pos = 0;
            std::size_t gi = 0;  // grad index cursor over conv groups
            for (std::size_t c = 0; c < model.n_columns(); ++c) {
                const auto& column = model.columns[c];
                const Matrix& a2 = sc.activations[c][1];
                Matrix d_a2(a2.rows, a2.cols);
                std::copy(dphi_row + pos, dphi_row + pos + a2.data.size(), d_a2.data.begin());
                pos += a2.data.size();

                const std::size_t n_sizes = column[0].filter_sizes.size();
                std::vector<Matrix*> gw1, gb1, gw2, gb2;
                for (std::size_t s = 0; s < n_sizes; ++s) {
                    gw1.push_back(&grads[gi + 2 * s]);
                    gb1.push_back(&grads[gi + 2 * s + 1]);
                    gw2.push_back(&grads[gi + 2 * n_sizes + 2 * s]);
                    gb2.push_back(&grads[gi + 2 * n_sizes + 2 * s + 1]);
                }
                gi += 4 * n_sizes;

                const Matrix& a1 = sc.activations[c][0];
                Matrix d_a1(a1.rows, a1.cols, 0.0);
                mrconv_backward(a1, column[1], a2, d_a2, gw2, gb2, &d_a1);
                mrconv_backward(sc.col_input[c], column[0], a1, d_a1, gw1, gb1, nullptr);
            }
        }
    }

    if (l2 != 0.0) {
        const auto mask = model.weight_mask();
        for (std::size_t p = 0; p < params.size(); ++p) {
            if (!mask[p]) continue;
            const auto& w = params[p]->data;
            auto& g = grads[p].data;
            for (std::size_t i = 0; i < w.size(); ++i) g[i] += 2.0 * l2 * w[i];
        }
    }
}

}  // namespace deepgraph::nn
