#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "deepgraph/errors.hpp"

namespace deepgraph {

// Dense row-major matrix of doubles. The one numeric container shared by the
// spectral, descriptor and network code.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row_ptr(std::size_t i) { return data.data() + i * cols; }
    const double* row_ptr(std::size_t i) const { return data.data() + i * cols; }

    std::size_t size() const { return data.size(); }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    Matrix transposed() const {
        Matrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
};

inline bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

// C = A * B. ikj order so the inner loop runs over contiguous rows of B and C;
// gcc vectorizes this well enough for the sizes we hit.
inline void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols != b.rows) throw ConfigError("matmul: inner dimensions differ");
    c.rows = a.rows;
    c.cols = b.cols;
    c.data.assign(a.rows * b.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
}

// C = A^T * B without materializing the transpose.
inline void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.rows != b.rows) throw ConfigError("matmul_at_b: row counts differ");
    c.rows = a.cols;
    c.cols = b.cols;
    c.data.assign(a.cols * b.cols, 0.0);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* arow = a.row_ptr(k);
        const double* brow = b.row_ptr(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.row_ptr(i);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
        }
    }
}

// C = A * B^T.
inline void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols != b.cols) throw ConfigError("matmul_a_bt: col counts differ");
    c.rows = a.rows;
    c.cols = b.rows;
    c.data.assign(a.rows * b.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.row_ptr(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
            crow[j] = s;
        }
    }
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace deepgraph
