#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/graph.hpp"
#include "deepgraph/matrix.hpp"

namespace deepgraph {

// Square matrix with entries[i][j] == entries[j][i] exactly. Construct via
// set(), which writes both triangles.
struct SymmetricMatrix {
    Matrix m;

    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : m(n, n, 0.0) {}

    std::size_t dim() const { return m.rows; }
    double operator()(std::size_t i, std::size_t j) const { return m(i, j); }
    void set(std::size_t i, std::size_t j, double v) {
        m(i, j) = v;
        m(j, i) = v;
    }
};

// D^{-1/2} (D - W) D^{-1/2} for the binary adjacency W. Rows and columns of
// isolated nodes are all-zero (the degree-0 entry of D^{-1/2} is taken as 0),
// which leaves them with the eigenpair (0, e_i).
inline SymmetricMatrix normalized_laplacian(const Graph& g) {
    const std::size_t n = g.num_nodes();
    SymmetricMatrix lap(n);
    std::vector<double> inv_sqrt_deg(n, 0.0);
    for (NodeId v = 0; v < n; ++v) {
        const auto d = g.degree(v);
        if (d > 0) {
            inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(d));
            lap.set(v, v, 1.0);
        }
    }
    for (auto [u, v] : g.edges()) lap.set(u, v, -inv_sqrt_deg[u] * inv_sqrt_deg[v]);
    return lap;
}

// Eigenvalues ascending; column k of eigenvectors is the unit eigenvector
// phi_k. Columns are orthonormal and the sign is fixed so the
// largest-magnitude component of each column is non-negative.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;  // n x n, column k = phi_k

    std::size_t dim() const { return eigenvalues.size(); }
};

struct EigOptions {
    double tol = 1e-12;       // relative off-diagonal threshold for deflation
    int max_iter_per_eig = 100;  // QL iteration cap; ~100*n sweeps total
};

namespace detail {

// Householder reduction of a symmetric matrix to tridiagonal form.
// On exit a holds the accumulated orthogonal transform Q, d the diagonal and
// e the subdiagonal (e[0] unused). Classic tred2, zero-indexed.
inline void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows;
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {  // accumulate the transform, skipping skipped steps
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
                for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    }
}

// Implicit-shift QL on a tridiagonal matrix, rotations accumulated into the
// columns of z. d: diagonal in, eigenvalues out. e: subdiagonal in e[1..n-1].
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z, const EigOptions& opt) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= opt.tol * dd) break;
            }
            if (m != l) {
                if (iter++ == opt.max_iter_per_eig)
                    throw NumericalError("eig_sym: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    e[i + 1] = r = std::hypot(f, g);
                    if (r == 0.0) {  // negligible rotation: deflate and retry
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace detail

// Full dense symmetric eigendecomposition: Householder tridiagonalization
// followed by implicit-shift QL. Deterministic for a fixed input: eigenpairs
// are sorted ascending with stable tie order and each eigenvector's sign is
// chosen so its largest-magnitude component is non-negative.
inline SpectralDecomposition eig_sym(const SymmetricMatrix& sym, const EigOptions& opt = {}) {
    const std::size_t n = sym.dim();
    if (n == 0) throw ConfigError("eig_sym: empty matrix");
    if (!all_finite(sym.m)) throw NumericalError("eig_sym: non-finite entries");

    Matrix q = sym.m;  // destroyed by the reduction, becomes the transform
    std::vector<double> d(n, 0.0), e(n, 0.0);
    if (n == 1) {
        d[0] = q(0, 0);
        q(0, 0) = 1.0;
    } else {
        detail::tridiagonalize(q, d, e);
        detail::ql_implicit(d, e, q, opt);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    SpectralDecomposition dec;
    dec.eigenvalues.resize(n);
    dec.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        dec.eigenvalues[k] = d[src];
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(q(i, src));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        const double sign = (q(arg, src) < 0.0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) dec.eigenvectors(i, k) = sign * q(i, src);
    }
    return dec;
}

// Phi diag(lambda) Phi^T; used by the reconstruction checks.
inline Matrix reconstruct(const SpectralDecomposition& dec) {
    const std::size_t n = dec.dim();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = dec.eigenvalues[k];
        if (lam == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = dec.eigenvectors(i, k) * lam;
            if (vik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * dec.eigenvectors(j, k);
        }
    }
    return out;
}

}  // namespace deepgraph
