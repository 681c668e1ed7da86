#pragma once

#include <vector>

#include <Eigen/Dense>

namespace wulff {

/// Fornberg weights for approximating d^m/dx^m at x0 from samples at the
/// given stencil points. Returns an (m+1) x npts matrix; row m holds the
/// weights of the m-th derivative.
inline Eigen::MatrixXd fornberg_weights(double x0, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size()) - 1;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m + 1, n + 1);
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
                c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k)
                c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
            c(0, j) = c4 * c(0, j) / c3;
        }
        c1 = c2;
    }
    return c;
}

/// Centered one-dimensional finite-difference derivative of callable f at 0,
/// sixth order, using the symmetric 9-point stencil with spacing h.
template <typename F>
double fd_derivative_1d(F&& f, int order, double h) {
    static thread_local Eigen::MatrixXd w9;
    if (w9.size() == 0) {
        std::vector<double> pts;
        for (int j = -4; j <= 4; ++j) pts.push_back(static_cast<double>(j));
        w9 = fornberg_weights(0.0, pts, 3);
    }
    double acc = 0.0;
    for (int j = -4; j <= 4; ++j) {
        const double wj = w9(order, j + 4);
        if (wj != 0.0) acc += wj * f(j * h);
    }
    double scale = 1.0;
    for (int k = 0; k < order; ++k) scale *= h;
    return acc / scale;
}

}  // namespace wulff
