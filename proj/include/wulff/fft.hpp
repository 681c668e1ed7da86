#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace wulff {

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Radix-2 Cooley-Tukey plan with cached twiddles and bit-reversal table.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        rev_.resize(n_);
        for (int i = 1, j = 0; i < n_; ++i) {
            int bit = n_ >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            rev_[i] = j;
        }
        tw_.resize(n_ / 2);
        for (int k = 0; k < n_ / 2; ++k) {
            const double ang = -2.0 * M_PI * k / n_;
            tw_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    // sign = -1 forward, +1 inverse (unnormalized); explicit real arithmetic
    // keeps the butterflies free of __muldc3 calls
    void run(std::vector<std::complex<double>>& a, int sign) const {
        for (int i = 1; i < n_; ++i)
            if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
        double* d = reinterpret_cast<double*>(a.data());
        const double si = (sign > 0) ? -1.0 : 1.0;
        for (int len = 2; len <= n_; len <<= 1) {
            const int stride = n_ / len;
            const int half = len / 2;
            for (int i = 0; i < n_; i += len) {
                for (int k = 0; k < half; ++k) {
                    const double wr = tw_[k * stride].real();
                    const double wi = si * tw_[k * stride].imag();
                    const int p = 2 * (i + k);
                    const int q = 2 * (i + k + half);
                    const double vr = d[q] * wr - d[q + 1] * wi;
                    const double vi = d[q] * wi + d[q + 1] * wr;
                    const double ur = d[p], ui = d[p + 1];
                    d[p] = ur + vr;
                    d[p + 1] = ui + vi;
                    d[q] = ur - vr;
                    d[q + 1] = ui - vi;
                }
            }
        }
    }

private:
    int n_;
    std::vector<int> rev_;
    std::vector<std::complex<double>> tw_;
};

}  // namespace detail

/// DFT of arbitrary length via radix-2 (power of two) or Bluestein's
/// chirp-z reduction. Forward convention X_k = sum_n x_n e^{-2pi i nk/N}.
class Fft {
public:
    explicit Fft(int n) : n_(n) {
        if (detail::is_pow2(n_)) {
            plan_ = std::make_shared<detail::FftPlan>(n_);
        } else {
            // Bluestein setup: chirp with n^2 reduced mod 2N to keep the
            // trig argument small and exact.
            len_ = 1;
            while (len_ < 2 * n_ - 1) len_ <<= 1;
            plan_ = std::make_shared<detail::FftPlan>(len_);
            chirp_.resize(n_);
            bhat_.assign(len_, {0.0, 0.0});
            for (int k = 0; k < n_; ++k) {
                const std::int64_t k2 = (static_cast<std::int64_t>(k) * k) % (2 * n_);
                const double ang = M_PI * static_cast<double>(k2) / n_;
                chirp_[k] = {std::cos(ang), -std::sin(ang)};
                bhat_[k] = std::conj(chirp_[k]);
                if (k > 0) bhat_[len_ - k] = std::conj(chirp_[k]);
            }
            plan_->run(bhat_, -1);
        }
    }

    void forward(std::vector<std::complex<double>>& a) const { run(a, -1); }
    void inverse(std::vector<std::complex<double>>& a) const {
        run(a, +1);
        const double s = 1.0 / n_;
        for (auto& v : a) v *= s;
    }

    int size() const { return n_; }

private:
    void run(std::vector<std::complex<double>>& a, int sign) const {
        if (len_ == 0) {
            plan_->run(a, sign);
            return;
        }
        std::vector<std::complex<double>> f(len_, {0.0, 0.0});
        for (int k = 0; k < n_; ++k) {
            std::complex<double> c = (sign < 0) ? chirp_[k] : std::conj(chirp_[k]);
            f[k] = a[k] * c;
        }
        plan_->run(f, -1);
        if (sign < 0) {
            for (int k = 0; k < len_; ++k) f[k] *= bhat_[k];
        } else {
            // conjugate chirp kernel
            for (int k = 0; k < len_; ++k) f[k] *= std::conj(bhat_[k]);
        }
        plan_->run(f, +1);
        const double s = 1.0 / len_;
        for (int k = 0; k < n_; ++k) {
            std::complex<double> c = (sign < 0) ? chirp_[k] : std::conj(chirp_[k]);
            a[k] = f[k] * c * s;
        }
    }

    int n_;
    int len_ = 0;
    std::shared_ptr<detail::FftPlan> plan_;
    std::vector<std::complex<double>> chirp_;
    std::vector<std::complex<double>> bhat_;
};

/// Spectral derivative of a real periodic sample vector on the uniform grid
/// theta_j = 2 pi j / N. order 1 or 2; the odd Nyquist mode is dropped for
/// order 1 as usual for trigonometric interpolation.
class SpectralDiff {
public:
    explicit SpectralDiff(int n) : fft_(n) {}

    Eigen::ArrayXd derivative(const Eigen::ArrayXd& f, int order) const {
        const int n = fft_.size();
        std::vector<std::complex<double>> a(n);
        for (int j = 0; j < n; ++j) a[j] = {f[j], 0.0};
        fft_.forward(a);
        // drop sub-roundoff coefficients before the k^order multiplier; for
        // band-limited data this removes the eps * (N/2)^2 noise floor
        double cmax2 = 0.0;
        for (const auto& v : a) cmax2 = std::max(cmax2, std::norm(v));
        const double eps16 = 16.0 * 2.220446049250313e-16;
        const double floor2 = eps16 * eps16 * cmax2;
        for (auto& v : a)
            if (std::norm(v) < floor2) v = {0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            int kk = (k <= n / 2) ? k : k - n;
            std::complex<double> mult;
            if (order == 1) {
                if (2 * k == n) kk = 0;  // Nyquist
                mult = {0.0, static_cast<double>(kk)};
            } else {
                mult = {-static_cast<double>(kk) * kk, 0.0};
            }
            a[k] *= mult;
        }
        fft_.inverse(a);
        Eigen::ArrayXd out(n);
        for (int j = 0; j < n; ++j) out[j] = a[j].real();
        return out;
    }

    /// Fourier coefficients c_k, k = 0..N-1 (forward DFT / N).
    std::vector<std::complex<double>> coefficients(const Eigen::ArrayXd& f) const {
        const int n = fft_.size();
        std::vector<std::complex<double>> a(n);
        for (int j = 0; j < n; ++j) a[j] = {f[j], 0.0};
        fft_.forward(a);
        for (auto& v : a) v /= n;
        return a;
    }

private:
    Fft fft_;
};

}  // namespace wulff
