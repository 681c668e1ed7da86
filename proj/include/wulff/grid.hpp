#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "wulff/errors.hpp"
#include "wulff/fft.hpp"

namespace wulff {

using Eigen::ArrayXd;

template <int N>
struct SphereGrid;

/// Uniform periodic grid on S^1 with trigonometric (spectral)
/// differentiation. Nodes theta_j = 2 pi j / N, equal quadrature weights.
template <>
struct SphereGrid<1> {
    static constexpr int sphere_dim = 1;
    static constexpr int ambient_dim = 2;
    using VecA = Eigen::Vector2d;
    using VecT = Eigen::Matrix<double, 1, 1>;
    using MatT = Eigen::Matrix<double, 1, 1>;

    explicit SphereGrid(int n_nodes) : n_(n_nodes), diff_(n_nodes) {
        if (n_ < 8) throw Error("SphereGrid<1>: need at least 8 nodes");
        theta_.resize(n_);
        nodes_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            theta_[j] = 2.0 * M_PI * j / n_;
            nodes_[j] = VecA(std::cos(theta_[j]), std::sin(theta_[j]));
        }
        weights_ = ArrayXd::Constant(n_, 2.0 * M_PI / n_);
    }

    int size() const { return n_; }
    double theta(int j) const { return theta_[j]; }
    const VecA& node(int j) const { return nodes_[j]; }
    double weight(int j) const { return weights_[j]; }
    const ArrayXd& weights() const { return weights_; }
    double sphere_measure() const { return 2.0 * M_PI; }

    double quad(const ArrayXd& f) const { return (weights_ * f).sum(); }

    /// Counterclockwise unit tangent at node j.
    VecA frame(int j, int /*a*/) const { return VecA(-nodes_[j][1], nodes_[j][0]); }

    ArrayXd d1(const ArrayXd& f) const { return diff_.derivative(f, 1); }
    ArrayXd d2(const ArrayXd& f) const { return diff_.derivative(f, 2); }

    std::vector<VecT> grad(const ArrayXd& f) const {
        ArrayXd g = d1(f);
        std::vector<VecT> out(n_);
        for (int j = 0; j < n_; ++j) out[j][0] = g[j];
        return out;
    }

    std::vector<MatT> hess(const ArrayXd& f) const {
        ArrayXd g = d2(f);
        std::vector<MatT> out(n_);
        for (int j = 0; j < n_; ++j) out[j](0, 0) = g[j];
        return out;
    }

    const SpectralDiff& spectral() const { return diff_; }

private:
    int n_;
    SpectralDiff diff_;
    std::vector<double> theta_;
    std::vector<VecA> nodes_;
    ArrayXd weights_;
};

/// Latitude-longitude grid on S^2 (cell-centered in latitude), fourth-order
/// centered differences with the standard over-pole identification
/// f(-theta, phi) = f(theta, phi + pi). Covariant derivatives are returned
/// in the orthonormal frame (e_theta, e_phi); the convention is the
/// right-handed one with the outward normal, i.e. e_theta x e_phi = z.
/// Latitude quadrature weights are constructed to integrate cos(k theta)
/// against sin(theta) exactly for k < nlat.
template <>
struct SphereGrid<2> {
    static constexpr int sphere_dim = 2;
    static constexpr int ambient_dim = 3;
    using VecA = Eigen::Vector3d;
    using VecT = Eigen::Vector2d;
    using MatT = Eigen::Matrix2d;

    SphereGrid(int nlat, int nlon) : nlat_(nlat), nlon_(nlon) {
        if (nlat_ < 8 || nlon_ < 8) throw Error("SphereGrid<2>: grid too small");
        if (nlon_ % 2 != 0) throw Error("SphereGrid<2>: nlon must be even");
        dth_ = M_PI / nlat_;
        dph_ = 2.0 * M_PI / nlon_;
        sin_t_.resize(nlat_);
        cos_t_.resize(nlat_);
        theta_.resize(nlat_);
        for (int i = 0; i < nlat_; ++i) {
            theta_[i] = (i + 0.5) * dth_;
            sin_t_[i] = std::sin(theta_[i]);
            cos_t_[i] = std::cos(theta_[i]);
        }
        build_weights();
        nodes_.resize(size());
        for (int i = 0; i < nlat_; ++i)
            for (int j = 0; j < nlon_; ++j) {
                const double ph = j * dph_;
                nodes_[idx(i, j)] =
                    VecA(sin_t_[i] * std::cos(ph), sin_t_[i] * std::sin(ph), cos_t_[i]);
            }
    }

    int nlat() const { return nlat_; }
    int nlon() const { return nlon_; }
    int size() const { return nlat_ * nlon_; }
    int idx(int i, int j) const { return i * nlon_ + j; }
    double theta(int i) const { return theta_[i]; }
    const VecA& node(int p) const { return nodes_[p]; }
    double weight(int p) const { return weights_[p]; }
    const ArrayXd& weights() const { return weights_; }
    double sphere_measure() const { return 4.0 * M_PI; }

    double quad(const ArrayXd& f) const { return (weights_ * f).sum(); }

    VecA frame(int p, int a) const {
        const int i = p / nlon_, j = p % nlon_;
        const double ph = j * dph_;
        if (a == 0)
            return VecA(cos_t_[i] * std::cos(ph), cos_t_[i] * std::sin(ph), -sin_t_[i]);
        return VecA(-std::sin(ph), std::cos(ph), 0.0);
    }

    // Chart partial derivatives of a node-sampled scalar field.
    ArrayXd dtheta(const ArrayXd& f) const { return stencil_theta(f, kC1); }
    ArrayXd dtheta2(const ArrayXd& f) const { return stencil_theta(f, kC2, true); }
    ArrayXd dphi(const ArrayXd& f) const { return stencil_phi(f, kC1); }
    ArrayXd dphi2(const ArrayXd& f) const { return stencil_phi(f, kC2, true); }
    ArrayXd dthetaphi(const ArrayXd& f) const { return stencil_theta(dphi(f), kC1); }

    std::vector<VecT> grad(const ArrayXd& f) const {
        ArrayXd ft = dtheta(f), fp = dphi(f);
        std::vector<VecT> out(size());
        for (int i = 0; i < nlat_; ++i)
            for (int j = 0; j < nlon_; ++j) {
                const int p = idx(i, j);
                out[p] = VecT(ft[p], fp[p] / sin_t_[i]);
            }
        return out;
    }

    std::vector<MatT> hess(const ArrayXd& f) const {
        ArrayXd ft = dtheta(f), fp = dphi(f);
        ArrayXd ftt = dtheta2(f), fpp = dphi2(f), ftp = dthetaphi(f);
        std::vector<MatT> out(size());
        for (int i = 0; i < nlat_; ++i) {
            const double s = sin_t_[i], c = cos_t_[i];
            for (int j = 0; j < nlon_; ++j) {
                const int p = idx(i, j);
                MatT h;
                h(0, 0) = ftt[p];
                h(0, 1) = h(1, 0) = ftp[p] / s - c * fp[p] / (s * s);
                h(1, 1) = fpp[p] / (s * s) + c / s * ft[p];
                out[p] = h;
            }
        }
        return out;
    }

private:
    static constexpr double kC1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    static constexpr double kC2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

    int wrap(int i, int j) const {
        if (i < 0) {
            i = -1 - i;
            j += nlon_ / 2;
        } else if (i >= nlat_) {
            i = 2 * nlat_ - 1 - i;
            j += nlon_ / 2;
        }
        j %= nlon_;
        if (j < 0) j += nlon_;
        return idx(i, j);
    }

    ArrayXd stencil_theta(const ArrayXd& f, const double (&c)[5], bool second = false) const {
        ArrayXd out(size());
        const double scale = second ? 1.0 / (dth_ * dth_) : 1.0 / dth_;
        for (int i = 0; i < nlat_; ++i)
            for (int j = 0; j < nlon_; ++j) {
                double acc = 0.0;
                for (int o = -2; o <= 2; ++o) acc += c[o + 2] * f[wrap(i + o, j)];
                out[idx(i, j)] = acc * scale;
            }
        return out;
    }

    ArrayXd stencil_phi(const ArrayXd& f, const double (&c)[5], bool second = false) const {
        ArrayXd out(size());
        const double scale = second ? 1.0 / (dph_ * dph_) : 1.0 / dph_;
        for (int i = 0; i < nlat_; ++i)
            for (int j = 0; j < nlon_; ++j) {
                double acc = 0.0;
                for (int o = -2; o <= 2; ++o) {
                    int jj = (j + o) % nlon_;
                    if (jj < 0) jj += nlon_;
                    acc += c[o + 2] * f[idx(i, jj)];
                }
                out[idx(i, j)] = acc * scale;
            }
        return out;
    }

    void build_weights() {
        // Solve sum_i w_i cos(k theta_i) = int_0^pi cos(k t) sin t dt.
        Eigen::MatrixXd M(nlat_, nlat_);
        Eigen::VectorXd rhs(nlat_);
        for (int k = 0; k < nlat_; ++k) {
            for (int i = 0; i < nlat_; ++i) M(k, i) = std::cos(k * theta_[i]);
            rhs[k] = (k == 1) ? 0.0 : (1.0 + std::cos(k * M_PI)) / (1.0 - k * k);
        }
        rhs[0] = 2.0;
        Eigen::VectorXd wt = M.colPivHouseholderQr().solve(rhs);
        for (int i = 0; i < nlat_; ++i)
            if (!(wt[i] > 0.0)) throw Error("SphereGrid<2>: nonpositive latitude weight");
        weights_.resize(size());
        for (int i = 0; i < nlat_; ++i)
            for (int j = 0; j < nlon_; ++j) weights_[idx(i, j)] = wt[i] * dph_;
    }

    int nlat_, nlon_;
    double dth_, dph_;
    std::vector<double> theta_, sin_t_, cos_t_;
    std::vector<VecA> nodes_;
    ArrayXd weights_;
};

}  // namespace wulff
