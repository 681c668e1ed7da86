#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wulff/body.hpp"
#include "wulff/errors.hpp"

namespace wulff {

/// Deterministic, platform-independent stream (splitmix64 core).
struct RandomStream {
    std::uint64_t state;
    explicit RandomStream(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// uniform in [-1, 1)
    double next_sym() { return 2.0 * next_unit() - 1.0; }
};

/// Derive an independent stream for a substream index (used to give Monte
/// Carlo strata and worker chunks scheduling-independent randomness).
inline RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    RandomStream mix(seed ^ (0x517cc1b727220a95ULL + index * 0x2545f4914f6cdd1dULL));
    mix.next_u64();
    return mix;
}

struct RandomBodySpec {
    std::uint64_t seed = 0;
    int n = 1;
    int modes = 6;
    double decay = 1.5;
    double margin = 0.05;
};

namespace detail {

// low-degree real harmonics on S^2 (restrictions of harmonic polynomials)
inline double s2_mode(int j, const Eigen::Vector3d& z) {
    const double x = z[0], y = z[1], w = z[2];
    switch (j % 12) {
        case 0: return x * y;
        case 1: return y * w;
        case 2: return x * w;
        case 3: return x * x - y * y;
        case 4: return 2 * w * w - x * x - y * y;
        case 5: return w * (2 * w * w - 3 * x * x - 3 * y * y);
        case 6: return x * (4 * w * w - x * x - y * y);
        case 7: return y * (4 * w * w - x * x - y * y);
        case 8: return w * (x * x - y * y);
        case 9: return x * y * w;
        case 10: return x * (x * x - 3 * y * y);
        case 11: return y * (3 * x * x - y * y);
    }
    return 0.0;
}

}  // namespace detail

/// h = 1 + sum of randomly weighted modes, with the coefficient vector
/// uniformly shrunk until the radii matrix clears the requested convexity
/// margin. Deterministic per seed.
template <int N>
SupportBody<N> random_convex_body(const RandomBodySpec& spec, const SphereGrid<N>& grid) {
    if (spec.n != N) throw Error("random_convex_body: spec dimension mismatch");
    RandomStream rng(spec.seed);
    SupportBody<N> body;
    body.grid = &grid;

    ArrayXd bump = ArrayXd::Zero(grid.size());
    if constexpr (N == 1) {
        for (int m = 1; m <= spec.modes; ++m) {
            const double amp = std::pow(static_cast<double>(m), -spec.decay);
            const double a = amp * rng.next_sym();
            const double b = amp * rng.next_sym();
            for (int i = 0; i < grid.size(); ++i)
                bump[i] += a * std::cos(m * grid.theta(i)) + b * std::sin(m * grid.theta(i));
        }
    } else {
        for (int j = 0; j < spec.modes; ++j) {
            const int degree = (j < 5) ? 2 : 3;
            const double amp = std::pow(static_cast<double>(degree), -spec.decay);
            const double c = amp * rng.next_sym();
            for (int i = 0; i < grid.size(); ++i)
                bump[i] += c * detail::s2_mode(j, grid.node(i));
        }
    }

    double scale = 1.0;
    for (int attempt = 0; attempt < 400; ++attempt) {
        body.h = 1.0 + scale * bump;
        if (body.h.minCoeff() > 0.0 && check_convex(body, spec.margin).ok) return body;
        scale *= 0.8;
    }
    body.h = ArrayXd::Ones(grid.size());
    return body;
}

}  // namespace wulff
