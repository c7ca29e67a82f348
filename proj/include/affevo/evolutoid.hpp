#pragma once

// Evolutoids E_α: envelopes of the lines through γ(s) with direction (1−α)γ_s + αγ_ss,
// their regularity, and their singular points.

#include "affevo/affine.hpp"
#include "affevo/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affevo {

struct EvolutoidSample {
    double s = 0.0;
    double t = 0.0;
    double alpha = 0.0;
    Vec2 X = Vec2::Zero();
    double D = 0.0;  // (1−α)² + μα²
    double A = 0.0;  // X_s = A v
    Vec2 v = Vec2::Zero();
};

enum class SingularityKind { A2, A3, Degenerate };

inline std::string_view to_string(SingularityKind kind) {
    switch (kind) {
        case SingularityKind::A2: return "A2";
        case SingularityKind::A3: return "A3";
        case SingularityKind::Degenerate: return "degenerate";
    }
    return "degenerate";
}

struct SingularityRecord {
    double s = 0.0;
    double t = 0.0;
    double alpha = 0.0;
    Vec2 X = Vec2::Zero();
    SingularityKind kind = SingularityKind::Degenerate;
    double g = 0.0;
    double h = 0.0;
    double q = 0.0;
    bool resolved = true;  // false when an iterative refinement did not converge
};

inline void require_alpha(double alpha) {
    if (alpha < 0.0) throw InputError("negative alpha is unsupported (evolutoids on the other side of the tangent)");
    if (alpha > 1.0 || std::isnan(alpha)) throw InputError("alpha must lie in [0, 1]");
}

inline double denominator(double mu, double alpha) {
    const double b = 1.0 - alpha;
    return b * b + mu * alpha * alpha;
}

/// g = α³μ_s − (1−α)((1−α)² + α²μ); zero exactly where E_α fails to be regular.
inline double singularity_function(const AffineJet& j, double alpha) {
    return alpha * alpha * alpha * j.mu_s - (1.0 - alpha) * denominator(j.mu, alpha);
}

/// h = αμ_ss − (1−α)μ_s; at a zero of g, h ≠ 0 means an ordinary cusp (A2). Note g_s = α²h.
inline double cusp_function(const AffineJet& j, double alpha) {
    return alpha * j.mu_ss - (1.0 - alpha) * j.mu_s;
}

/// q = α⁵μ_sss − (1−α)³((1−α)² + α²μ); at g = h = 0 it is α²D·F_ssss, so q ≠ 0 means A3.
inline double swallowtail_function(const AffineJet& j, double alpha) {
    const double b = 1.0 - alpha;
    return std::pow(alpha, 5) * j.mu_sss - b * b * b * denominator(j.mu, alpha);
}

inline EvolutoidSample evolutoid_point(const AffineJet& j, double alpha, const Tolerances& tol = {}) {
    require_alpha(alpha);
    EvolutoidSample e;
    e.s = j.s;
    e.t = j.t;
    e.alpha = alpha;
    e.D = denominator(j.mu, alpha);
    // D < 0 is legitimate where μ < 0; only D ≈ 0 sends the envelope point to infinity
    if (std::abs(e.D) < tol.denominator) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "evolutoid point at infinity: (1-a)^2 + mu a^2 = %.3g", e.D);
        throw NumericalError(buf);
    }
    e.v = (1.0 - alpha) * j.gamma_s + alpha * j.gamma_ss;
    e.X = j.gamma + (alpha / e.D) * e.v;
    e.A = (1.0 - alpha) / e.D - alpha * alpha * alpha * j.mu_s / (e.D * e.D);
    return e;
}

inline EvolutoidSample evolutoid_point(const AffineJetTable& jets, std::size_t i, double alpha) {
    return evolutoid_point(jets.at(i), alpha, jets.tolerances());
}

/// One envelope sample per grid node (closed polyline).
inline std::vector<EvolutoidSample> evolutoid_curve(const AffineJetTable& jets, double alpha) {
    std::vector<EvolutoidSample> out;
    out.reserve(jets.size());
    for (std::size_t i = 0; i < jets.size(); ++i) out.push_back(evolutoid_point(jets, i, alpha));
    return out;
}

/// A = (1−α)/D − α³μ_s/D², the speed of E_α along v.
inline double regularity_function(const AffineJet& j, double alpha, const Tolerances& tol = {}) {
    return evolutoid_point(j, alpha, tol).A;
}

inline double regularity_function(const AffineJetTable& jets, std::size_t i, double alpha) {
    return evolutoid_point(jets, i, alpha).A;
}

namespace detail {

inline SingularityKind classify(double h, double q, double threshold) {
    if (std::abs(h) > threshold) return SingularityKind::A2;
    if (std::abs(q) > threshold) return SingularityKind::A3;
    return SingularityKind::Degenerate;
}

inline double g_at(const AffineJetTable& jets, double t, double alpha) {
    const auto [mu, mu_s] = jets.mu_and_mu_s(t);
    return alpha * alpha * alpha * mu_s - (1.0 - alpha) * denominator(mu, alpha);
}

inline double wrap_parameter(double t) {
    double w = std::fmod(t, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

inline double max_speed(const AffineJetTable& jets) {
    double m = 0.0;
    for (std::size_t i = 0; i < jets.size(); ++i) m = std::max(m, std::cbrt(jets.kappa()[i]));
    return m;
}

}  // namespace detail

/// Record for a root (t, α) of g: envelope point and A2/A3/degenerate classification.
inline SingularityRecord make_singularity_record(const AffineJetTable& jets, double t, double alpha) {
    const auto& tol = jets.tolerances();
    const AffineJet j = jets.evaluate(t);
    SingularityRecord r;
    r.t = t;
    r.s = j.s;
    r.alpha = alpha;
    r.g = singularity_function(j, alpha);
    r.h = cusp_function(j, alpha);
    r.q = swallowtail_function(j, alpha);
    r.X = evolutoid_point(j, alpha, tol).X;
    const double threshold = tol.classification * jets.mu_scale();
    r.kind = std::abs(j.mu) <= threshold ? SingularityKind::Degenerate : detail::classify(r.h, r.q, threshold);
    return r;
}

/// Classifies the singular point of E_α at affine arclength s0 (a root of g).
inline SingularityKind classify_singularity(const AffineJetTable& jets, double s0, double alpha) {
    require_alpha(alpha);
    const auto& tol = jets.tolerances();
    const AffineJet j = jets.evaluate(jets.parameter_at(s0));
    const double g = singularity_function(j, alpha);
    if (std::abs(g) > tol.root)
        throw InputError("classify_singularity called away from a root of g (|g| = " + std::to_string(std::abs(g)) + ")");
    const double threshold = tol.classification * jets.mu_scale();
    if (std::abs(j.mu) <= threshold)
        throw NumericalError("affine curvature vanishes at the singular point; classification undefined");
    return detail::classify(cusp_function(j, alpha), swallowtail_function(j, alpha), threshold);
}

/// Parameters t ∈ [0, 2π) of the transversal zeros of g(·, α), sorted by t.
inline std::vector<double> singular_parameters(const AffineJetTable& jets, double alpha) {
    require_alpha(alpha);
    std::vector<double> roots;
    if (alpha == 0.0) return roots;  // g ≡ −1
    const std::size_t n = jets.size();
    const double h = jets.spacing();
    const double zero_band = 1e-2 * jets.tolerances().root;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = singularity_function(jets.at(i), alpha);

    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(g[i]) > zero_band) {
            start = i;
            break;
        }
    if (start == n) return roots;  // g vanishes identically: no transversal crossings

    const double resolution = 1e-10 / detail::max_speed(jets);  // |Δs| ≤ 1e-10
    std::size_t last = start;
    for (std::size_t step = 1; step <= n; ++step) {
        const std::size_t i = (start + step) % n;
        if (std::abs(g[i]) <= zero_band) continue;
        if ((g[i] > 0.0) != (g[last] > 0.0)) {
            double lo = jets.t(last);
            double hi = lo + h * static_cast<double>((i + n - last) % n == 0 ? n : (i + n - last) % n);
            double glo = detail::g_at(jets, lo, alpha);
            const double ghi = detail::g_at(jets, hi, alpha);
            if ((glo > 0.0) != (ghi > 0.0)) {
                while (hi - lo > resolution) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = detail::g_at(jets, mid, alpha);
                    if (gm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((gm > 0.0) == (glo > 0.0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(detail::wrap_parameter(0.5 * (lo + hi)));
            }
        }
        last = i;
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || r - unique.back() >= h) unique.push_back(r);
    if (unique.size() > 1 && unique.front() + kTwoPi - unique.back() < h) unique.pop_back();
    return unique;
}

/// Singular points of E_α, sorted by s. Empty means E_α is smooth.
inline std::vector<SingularityRecord> singular_points(const AffineJetTable& jets, double alpha) {
    std::vector<SingularityRecord> out;
    for (double t : singular_parameters(jets, alpha)) out.push_back(make_singularity_record(jets, t, alpha));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
    return out;
}

/// Solution of g = h = 0 in (t, α): a tangential zero of g, i.e. where a pair of cusps is born or dies.
struct FoldPoint {
    double t = 0.0;
    double alpha = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton iteration on (g, h) with analytic partials in (t, α).
inline FoldPoint refine_fold(const AffineJetTable& jets, double t0, double alpha0, int max_iterations = 50) {
    FoldPoint p{t0, alpha0, 0, false};
    auto residual = [&](double t, double a) {
        const AffineJet j = jets.evaluate(t);
        return Eigen::Vector2d(singularity_function(j, a), cusp_function(j, a));
    };
    const double scale = std::max(1.0, jets.mu_scale());
    Eigen::Vector2d r = residual(p.t, p.alpha);
    for (int it = 0; it < max_iterations; ++it) {
        p.iterations = it + 1;
        const AffineJet j = jets.evaluate(p.t);
        const double a = p.alpha;
        const double b = 1.0 - a;
        const double D = denominator(j.mu, a);
        const double h = cusp_function(j, a);
        Eigen::Matrix2d J;
        J(0, 0) = j.s_t * a * a * h;
        J(0, 1) = 3.0 * a * a * j.mu_s + D + 2.0 * b * b - 2.0 * a * b * j.mu;
        J(1, 0) = j.s_t * (a * j.mu_sss - b * j.mu_ss);
        J(1, 1) = j.mu_ss + j.mu_s;
        const double det = J.determinant();
        if (!(std::abs(det) > 1e-14 * scale * scale)) return p;
        Eigen::Vector2d step = -J.inverse() * r;
        double damping = 1.0;
        Eigen::Vector2d trial_r;
        double tt = p.t, ta = p.alpha;
        for (int tries = 0; tries < 30; ++tries) {
            tt = p.t + damping * step(0);
            ta = p.alpha + damping * step(1);
            if (ta > 0.0 && ta <= 1.0) {
                trial_r = residual(tt, ta);
                if (trial_r.norm() <= r.norm() || trial_r.norm() < 1e-13 * scale) break;
            }
            damping *= 0.5;
        }
        if (!(ta > 0.0 && ta <= 1.0)) return p;
        const double moved = std::abs(damping * step(0)) * j.s_t + std::abs(damping * step(1));
        p.t = detail::wrap_parameter(tt);
        p.alpha = ta;
        r = trial_r;
        if (moved < 1e-13 || r.norm() < 1e-13 * scale) {
            p.converged = r.norm() < 1e-9 * scale;
            return p;
        }
    }
    return p;
}

struct AlphaBorn {
    double alpha = 1.0;
    double s = 0.0;
    double t = 0.0;
    bool polished = false;  // Newton on (g, g_s) converged
};

/// Smallest α ∈ (0, 1] at which g(·, α) reaches zero, i.e. where E_α first loses regularity.
inline AlphaBorn alpha_born(const AffineJetTable& jets, double alpha_tol = 1e-10, std::size_t scan_steps = 256) {
    if (!(alpha_tol > 0.0)) throw InputError("alpha tolerance must be positive");
    const std::size_t n = jets.size();
    auto max_g = [&](double alpha, std::size_t* arg = nullptr) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double g = singularity_function(jets.at(i), alpha);
            if (g > best) {
                best = g;
                if (arg) *arg = i;
            }
        }
        return best;
    };
    // g(., 1) = μ_s vanishes somewhere on every closed curve, so α = 1 always qualifies
    auto predicate = [&](double alpha) { return alpha >= 1.0 || max_g(alpha) >= 0.0; };

    double lo = 0.0, hi = 1.0;
    for (std::size_t k = 1; k <= scan_steps; ++k) {
        const double a = static_cast<double>(k) / static_cast<double>(scan_steps);
        if (predicate(a)) {
            hi = a;
            break;
        }
        lo = a;
    }
    while (hi - lo > alpha_tol) {
        const double mid = 0.5 * (lo + hi);
        if (predicate(mid)) hi = mid;
        else lo = mid;
    }

    std::size_t arg = 0;
    max_g(hi, &arg);
    AlphaBorn out;
    out.alpha = hi;
    out.t = jets.t(arg);
    out.s = jets.s()[arg];
    const double cell = 1.0 / static_cast<double>(scan_steps);
    const FoldPoint fold = refine_fold(jets, out.t, hi);
    if (fold.converged && std::abs(fold.alpha - hi) <= cell &&
        std::abs(std::remainder(fold.t - out.t, kTwoPi)) <= 4.0 * jets.spacing()) {
        out.alpha = fold.alpha;
        out.t = fold.t;
        out.s = jets.arclength_at(fold.t);
        out.polished = true;
    }
    return out;
}

struct CuspCheck {
    double numeric = 0.0;   // [X_ss, X_sss] by central differences of X(s)
    double analytic = 0.0;  // 2 A_s² D
};

/// Compares [X_ss, X_sss] from finite differences of the envelope with 2A_s²[v, v_s] = 2A_s²D.
inline CuspCheck cusp_third_derivative_check(const AffineJetTable& jets, double s0, double alpha, double step = 1e-3) {
    require_alpha(alpha);
    if (!(step > 1e3 * std::numeric_limits<double>::epsilon() * jets.length()))
        throw NumericalError("finite-difference step underflows the grid resolution");
    const auto& tol = jets.tolerances();
    auto X = [&](double s) { return evolutoid_point(jets.evaluate(jets.parameter_at(s)), alpha, tol).X; };
    const Vec2 xm2 = X(s0 - 2 * step), xm1 = X(s0 - step), x0 = X(s0), xp1 = X(s0 + step), xp2 = X(s0 + 2 * step);
    const Vec2 x_ss = (xp1 - 2.0 * x0 + xm1) / (step * step);
    const Vec2 x_sss = (xp2 - 2.0 * xp1 + 2.0 * xm1 - xm2) / (2.0 * step * step * step);

    const AffineJet j = jets.evaluate(jets.parameter_at(s0));
    const double D = denominator(j.mu, alpha);
    const double g = singularity_function(j, alpha);
    const double g_s = alpha * alpha * cusp_function(j, alpha);
    const double D_s = alpha * alpha * j.mu_s;
    const double A_s = -g_s / (D * D) + 2.0 * g * D_s / (D * D * D);
    return {bracket(x_ss, x_sss), 2.0 * A_s * A_s * D};
}

}  // namespace affevo
