#pragma once

#include <cmath>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/matrix.hpp"

namespace deepgraph {

// Closed-form ridge regression on internally standardized features with an
// unpenalized intercept. Standardization stats come from the training data
// and are stored so prediction applies the same affine map.
struct RidgeModel {
    std::vector<double> weights;  // on the standardized scale
    double intercept = 0.0;
    double l2 = 0.0;
    std::vector<double> feature_means;
    std::vector<double> feature_sds;  // floored at kSdFloor

    static constexpr double kSdFloor = 1e-8;
    std::size_t n_features() const { return weights.size(); }
};

namespace detail {

// Cholesky solve of (A + l2*I) x = b for symmetric positive (semi)definite A.
// Throws NumericalError when a pivot collapses, which with l2 == 0 signals a
// singular normal system.
inline std::vector<double> solve_spd(Matrix a, std::vector<double> b, double l2) {
    const std::size_t n = a.rows;
    for (std::size_t i = 0; i < n; ++i) a(i, i) += l2;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NumericalError("ridge_fit: singular normal equations; set l2 > 0");
        const double root = std::sqrt(d);
        a(j, j) = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            const double* ri = a.row_ptr(i);
            const double* rj = a.row_ptr(j);
            for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
            a(i, j) = s / root;
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        const double* ri = a.row_ptr(i);
        for (std::size_t k = 0; k < i; ++k) s -= ri[k] * b[k];
        b[i] = s / ri[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
        b[i] = s / a(i, i);
    }
    return b;
}

}  // namespace detail

// Fit on raw features X (one row per instance). Features are standardized by
// training mean/sd, the intercept absorbs mean(y), and
// (Xs^T Xs + l2*I) w = Xs^T (y - mean(y)) is solved in closed form.
inline RidgeModel ridge_fit(const Matrix& x, const std::vector<double>& y, double l2) {
    if (x.rows == 0 || x.rows != y.size()) throw ConfigError("ridge_fit: bad shapes");
    if (l2 < 0.0) throw ConfigError("ridge_fit: negative l2");
    const std::size_t n = x.rows, p = x.cols;

    RidgeModel model;
    model.l2 = l2;
    model.feature_means.assign(p, 0.0);
    model.feature_sds.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        for (std::size_t j = 0; j < p; ++j) model.feature_means[j] += row[j];
    }
    for (double& m : model.feature_means) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - model.feature_means[j];
            model.feature_sds[j] += d * d;
        }
    }
    for (double& s : model.feature_sds)
        s = std::max(std::sqrt(s / static_cast<double>(n)), RidgeModel::kSdFloor);

    Matrix xs(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            xs(i, j) = (x(i, j) - model.feature_means[j]) / model.feature_sds[j];

    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    model.intercept = y_mean;

    Matrix xtx;
    matmul_at_b(xs, xs, xtx);
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double yc = y[i] - y_mean;
        const double* row = xs.row_ptr(i);
        for (std::size_t j = 0; j < p; ++j) xty[j] += row[j] * yc;
    }
    model.weights = detail::solve_spd(std::move(xtx), std::move(xty), l2);
    return model;
}

inline double ridge_predict(const RidgeModel& model, const std::vector<double>& features) {
    if (features.size() != model.n_features()) throw ConfigError("ridge_predict: feature count mismatch");
    double out = model.intercept;
    for (std::size_t j = 0; j < features.size(); ++j)
        out += model.weights[j] * (features[j] - model.feature_means[j]) / model.feature_sds[j];
    return out;
}

inline std::vector<double> ridge_predict(const RidgeModel& model, const Matrix& x) {
    std::vector<double> out(x.rows);
    std::vector<double> row(x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        std::copy(x.row_ptr(i), x.row_ptr(i) + x.cols, row.begin());
        out[i] = ridge_predict(model, row);
    }
    return out;
}

}  // namespace deepgraph
