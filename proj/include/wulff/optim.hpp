#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace wulff {

/// Golden-section minimization of a unimodal callable on [a, b].
/// Returns the argmin; tol is the absolute window size at termination.
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
};

/// Nelder-Mead simplex minimization, deterministic. tol is the coordinate
/// diameter of the simplex at termination.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x0, double scale, double tol,
                                    int max_iter = 4000) {
    const int d = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> pts(d + 1, x0);
    std::vector<double> val(d + 1);
    for (int i = 0; i < d; ++i) pts[i + 1][i] += scale;
    for (int i = 0; i <= d; ++i) val[i] = f(pts[i]);

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        // order
        std::vector<int> ord(d + 1);
        for (int i = 0; i <= d; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            return val[a] < val[b] || (val[a] == val[b] && a < b);
        });
        std::vector<Eigen::VectorXd> p2(d + 1);
        std::vector<double> v2(d + 1);
        for (int i = 0; i <= d; ++i) {
            p2[i] = pts[ord[i]];
            v2[i] = val[ord[i]];
        }
        pts.swap(p2);
        val.swap(v2);

        double diam = 0.0;
        for (int i = 1; i <= d; ++i) diam = std::max(diam, (pts[i] - pts[0]).lpNorm<Eigen::Infinity>());
        if (diam < tol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d; ++i) centroid += pts[i];
        centroid /= d;

        Eigen::VectorXd xr = centroid + (centroid - pts[d]);
        double fr = f(xr);
        if (fr < val[0]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[d]);
            double fe = f(xe);
            if (fe < fr) {
                pts[d] = xe;
                val[d] = fe;
            } else {
                pts[d] = xr;
                val[d] = fr;
            }
        } else if (fr < val[d - 1]) {
            pts[d] = xr;
            val[d] = fr;
        } else {
            Eigen::VectorXd xc = centroid + 0.5 * (pts[d] - centroid);
            double fc = f(xc);
            if (fc < val[d]) {
                pts[d] = xc;
                val[d] = fc;
            } else {
                for (int i = 1; i <= d; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    val[i] = f(pts[i]);
                }
            }
        }
    }
    res.x = pts[0];
    res.value = val[0];
    res.iterations = it;
    return res;
}

}  // namespace wulff
