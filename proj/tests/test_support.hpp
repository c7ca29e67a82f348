#pragma once

#include "affevo/affevo.hpp"

#include <cmath>
#include <random>

namespace affevo::fixtures {

inline constexpr double kSigmaPhase = 1.9;

inline AffineJetTable sigma_jets(std::size_t n = 1024) {
    return AffineJetTable(sample_curve(two_harmonic_curve(kSigmaPhase), n));
}

inline AffineJetTable ellipse_jets(double a, double b, std::size_t n = 1024) {
    return AffineJetTable(sample_curve(Ellipse{a, b}, n));
}

/// Ellipse (a cos t, b sin t) plus small harmonics up to order 4; convex for the amplitudes drawn.
inline TrigPolynomial random_convex_curve(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> axis(1.0, 3.0), amp(-1.0, 1.0);
    for (;;) {
        const double a = axis(rng), b = axis(rng);
        TrigPolynomial p{{{1, a, 0.0}}, {{1, 0.0, b}}};
        const double scale = 0.015 * std::min(a, b);
        for (int k = 2; k <= 4; ++k) {
            p.x.push_back({k, scale * amp(rng), scale * amp(rng)});
            p.y.push_back({k, scale * amp(rng), scale * amp(rng)});
        }
        const double margin = check_no_inflexions(sample_curve(p, 256));
        if (margin > 0.5 * a * b) return p;
    }
}

/// Random M with det M = 1.
inline Mat2 random_unimodular(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (;;) {
        Mat2 m;
        m << u(rng), u(rng), u(rng), u(rng);
        const double det = m.determinant();
        if (std::abs(det) < 0.3) continue;
        m /= std::sqrt(std::abs(det));
        if (det < 0.0) m.col(0) *= -1.0;
        return m;
    }
}

}  // namespace affevo::fixtures
