#pragma once

#include <span>
#include <vector>

#include "cddr/common.hpp"

namespace cddr {

using Vec = std::vector<double>;

/// Dense row-major matrix. Blocks in this code base are small (per-stage
/// constraint blocks), so dense storage is the right tradeoff; sparsity
/// lives at the LP level, not here.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {
        require(r >= 0 && c >= 0, "Mat: negative dimension");
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
    bool empty() const { return rows == 0 || cols == 0; }
};

inline Vec matvec(const Mat& a, std::span<const double> x) {
    require(static_cast<int>(x.size()) == a.cols, "matvec: dimension mismatch");
    Vec y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// y += alpha * x
inline void add_scaled(Vec& y, double alpha, std::span<const double> x) {
    require(y.size() == x.size(), "add_scaled: dimension mismatch");
    for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

/// Solves a small dense square system in place (partial pivoting).
/// Returns false when the matrix is numerically singular.
bool solve_dense(Mat a, Vec b, Vec& x, double pivot_tol = 1e-12);

/// Rank of a dense matrix via row elimination with relative tolerance.
int matrix_rank(Mat a, double tol = 1e-9);

} // namespace cddr
