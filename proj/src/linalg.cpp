#include "cddr/linalg.hpp"

#include <cmath>

namespace cddr {

bool solve_dense(Mat a, Vec b, Vec& x, double pivot_tol) {
    require(a.rows == a.cols, "solve_dense: matrix not square");
    require(static_cast<int>(b.size()) == a.rows, "solve_dense: rhs size mismatch");
    const int n = a.rows;
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(perm[static_cast<size_t>(k)], k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a(perm[static_cast<size_t>(i)], k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= pivot_tol) return false;
        std::swap(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(piv)]);
        const int pk = perm[static_cast<size_t>(k)];
        for (int i = k + 1; i < n; ++i) {
            const int pi = perm[static_cast<size_t>(i)];
            const double f = a(pi, k) / a(pk, k);
            if (f == 0.0) continue;
            a(pi, k) = 0.0;
            for (int j = k + 1; j < n; ++j) a(pi, j) -= f * a(pk, j);
            b[static_cast<size_t>(pi)] -= f * b[static_cast<size_t>(pk)];
        }
    }
    x.assign(static_cast<size_t>(n), 0.0);
    for (int k = n - 1; k >= 0; --k) {
        const int pk = perm[static_cast<size_t>(k)];
        double s = b[static_cast<size_t>(pk)];
        for (int j = k + 1; j < n; ++j) s -= a(pk, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(k)] = s / a(pk, k);
    }
    return true;
}

int matrix_rank(Mat a, double tol) {
    const int m = a.rows, n = a.cols;
    double scale = 0.0;
    for (double v : a.data) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;
    const double thresh = tol * scale;
    int rank = 0;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int piv = -1;
        double best = thresh;
        for (int i = row; i < m; ++i) {
            if (std::abs(a(i, col)) > best) {
                best = std::abs(a(i, col));
                piv = i;
            }
        }
        if (piv < 0) continue;
        for (int j = 0; j < n; ++j) std::swap(a(row, j), a(piv, j));
        for (int i = row + 1; i < m; ++i) {
            const double f = a(i, col) / a(row, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(i, j) -= f * a(row, j);
        }
        ++row;
        ++rank;
    }
    return rank;
}

} // namespace cddr
