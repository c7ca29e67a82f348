#pragma once

// Equi-affine frame of a closed curve: affine arclength, tangent γ_s, normal γ_ss,
// affine curvature μ and its arclength derivatives, computed from any parametrisation.

#include "affevo/curve.hpp"
#include "affevo/spectral.hpp"
#include "affevo/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace affevo {

/// Affine data at a single parameter value.
struct AffineJet {
    double t = 0.0;
    double s = 0.0;
    double s_t = 0.0;  // κ^{1/3}
    Vec2 gamma = Vec2::Zero();
    Vec2 gamma_s = Vec2::Zero();
    Vec2 gamma_ss = Vec2::Zero();
    double mu = 0.0;
    double mu_s = 0.0;
    double mu_ss = 0.0;
    double mu_sss = 0.0;
};

/// Second-order Taylor data y = a2 t²/2 + a3 t³/6 + a4 t⁴/24 of a graph through the origin.
struct MongeJet {
    double a2 = 1.0;
    double a3 = 0.0;
    double a4 = 0.0;
};

/// μ(0) = (3a₂a₄ − 5a₃²) / (9 a₂^{8/3}) for a curve in Monge form.
inline double monge_affine_curvature(const MongeJet& jet) {
    if (jet.a2 == 0.0) throw InputError("Monge jet has a2 = 0 (euclidean inflexion at the origin)");
    const double r = std::cbrt(jet.a2);
    return (3.0 * jet.a2 * jet.a4 - 5.0 * jet.a3 * jet.a3) / (9.0 * std::pow(r, 8));
}

/// μ from the first four parameter derivatives at one point, with κ_tt = [γ_tt,γ_ttt] + [γ_t,γ_tttt].
inline double affine_curvature_at(const Vec2& d1, const Vec2& d2, const Vec2& d3, const Vec2& d4) {
    const double kappa = bracket(d1, d2);
    const double kappa_t = bracket(d1, d3);
    const double kappa_tt = bracket(d2, d3) + bracket(d1, d4);
    const double r = std::cbrt(kappa);
    return (3.0 * kappa * kappa_tt - 5.0 * kappa_t * kappa_t + 9.0 * kappa * bracket(d2, d3)) /
           (9.0 * std::pow(r, 8));
}

/// κ = [γ_t, γ_tt] per node.
inline std::vector<double> affine_speed(const SampledCurve& curve) {
    std::vector<double> kappa(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) kappa[i] = bracket(curve.d(1, i), curve.d(2, i));
    return kappa;
}

namespace detail {

struct Oriented {
    SampledCurve curve;
    bool reversed = false;
};

// Positively oriented copy of the curve. κ must keep one sign and stay above the threshold.
inline Oriented orient(const SampledCurve& curve, const Tolerances& tol) {
    const auto kappa = affine_speed(curve);
    const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
    const double min_abs = check_no_inflexions(curve);
    if (min_abs < tol.inflexion || (*lo < 0.0 && *hi > 0.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "curve has an affine inflexion: min |kappa| = %.17g", min_abs);
        throw InflexionError(buf, min_abs);
    }
    if (*hi < 0.0) return {curve.reversed(), true};
    return {curve, false};
}

inline std::vector<double> chain_derivative(const std::vector<double>& f, const std::vector<double>& s_t,
                                            const Tolerances& tol) {
    auto df = spectral::derivative(f, 1, tol.spectral_floor);
    for (std::size_t i = 0; i < df.size(); ++i) df[i] /= s_t[i];
    return df;
}

}  // namespace detail

struct ArcLength {
    std::vector<double> s;
    double length = 0.0;
};

/// s(t_i) = ∫₀^{t_i} κ^{1/3} dt by spectral quadrature, and the total affine length.
inline ArcLength affine_arclength(const SampledCurve& curve, const Tolerances& tol = {}) {
    const auto oriented = detail::orient(curve, tol);
    auto s_t = affine_speed(oriented.curve);
    for (auto& v : s_t) v = std::cbrt(v);
    auto integral = spectral::antiderivative(s_t, tol.spectral_floor);
    return {std::move(integral.values), integral.period_integral};
}

/// ξ = κ^{-2/3} γ_tt − ⅓ κ_t κ^{-5/3} γ_t from the first three parameter derivatives (κ_t = [γ_t, γ_ttt]).
inline Vec2 affine_normal_at(const Vec2& d1, const Vec2& d2, const Vec2& d3) {
    const double kappa = bracket(d1, d2);
    const double kappa_t = bracket(d1, d3);
    const double r = std::cbrt(kappa);
    return d2 / (r * r) - kappa_t / (3.0 * kappa * r * r) * d1;
}

inline std::vector<Vec2> affine_normal(const SampledCurve& curve, const Tolerances& tol = {}) {
    const auto oriented = detail::orient(curve, tol);
    const auto& c = oriented.curve;
    std::vector<Vec2> xi(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) xi[i] = affine_normal_at(c.d(1, i), c.d(2, i), c.d(3, i));
    return xi;
}

/// μ = (3κκ_tt − 5κ_t² + 9κ[γ_tt,γ_ttt]) κ^{-8/3} / 9 with κ_tt from spectral differentiation of κ.
inline std::vector<double> affine_curvature(const SampledCurve& curve, const Tolerances& tol = {}) {
    const auto oriented = detail::orient(curve, tol);
    const auto& c = oriented.curve;
    const auto kappa = affine_speed(c);
    const auto kappa_tt = spectral::derivative(kappa, 2, tol.spectral_floor);
    std::vector<double> mu(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double kappa_t = bracket(c.d(1, i), c.d(3, i));
        mu[i] = (3.0 * kappa[i] * kappa_tt[i] - 5.0 * kappa_t * kappa_t +
                 9.0 * kappa[i] * bracket(c.d(2, i), c.d(3, i))) *
                std::pow(kappa[i], -8.0 / 3.0) / 9.0;
    }
    return mu;
}

/// Frame obtained by explicit chain rule from d[1..4]; an independent route to γ_ss and γ_sss.
struct ChainRuleFrame {
    std::vector<Vec2> gamma_s;
    std::vector<Vec2> gamma_ss;
    std::vector<Vec2> gamma_sss;
};

inline ChainRuleFrame chain_rule_frame(const SampledCurve& curve, const Tolerances& tol = {}) {
    const auto oriented = detail::orient(curve, tol);
    const auto& c = oriented.curve;
    ChainRuleFrame f;
    const std::size_t n = c.size();
    f.gamma_s.resize(n);
    f.gamma_ss.resize(n);
    f.gamma_sss.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& g1 = c.d(1, i);
        const Vec2& g2 = c.d(2, i);
        const Vec2& g3 = c.d(3, i);
        const Vec2& g4 = c.d(4, i);
        const double k = bracket(g1, g2);
        const double kt = bracket(g1, g3);
        const double ktt = bracket(g2, g3) + bracket(g1, g4);
        const double r = std::cbrt(k);
        f.gamma_s[i] = g1 / r;
        f.gamma_ss[i] = g2 / (r * r) - kt / (3.0 * k * r * r) * g1;
        f.gamma_sss[i] = g3 / k - kt / (k * k) * g2 +
                         (-ktt / (3.0 * k * k) + 5.0 * kt * kt / (9.0 * k * k * k)) * g1;
    }
    return f;
}

struct MuDerivatives {
    std::vector<double> mu_s;
    std::vector<double> mu_ss;
    std::vector<double> mu_sss;
};

/// Chain-ruled μ_s = μ_t κ^{-1/3}, μ_ss = (μ_s)_t κ^{-1/3}, μ_sss likewise (t-derivatives spectral).
inline MuDerivatives mu_derivatives(const std::vector<double>& mu, const std::vector<double>& s_t,
                                    const Tolerances& tol = {}) {
    MuDerivatives out;
    out.mu_s = detail::chain_derivative(mu, s_t, tol);
    out.mu_ss = detail::chain_derivative(out.mu_s, s_t, tol);
    out.mu_sss = detail::chain_derivative(out.mu_ss, s_t, tol);
    return out;
}

/// Tabulated affine jets on the uniform grid, plus trigonometric interpolants for off-grid queries.
/// If the input runs clockwise (κ < 0) the table is built on the reversed curve and `reversed()` is set.
class AffineJetTable {
public:
    explicit AffineJetTable(const SampledCurve& input, const Tolerances& tol = {})
        : tol_(tol), curve_(detail::orient(input, tol).curve) {
        reversed_ = bracket(input.d(1, 0), input.d(2, 0)) < 0.0;
        const std::size_t n = curve_.size();
        kappa_ = affine_speed(curve_);
        kappa_t_.resize(n);
        s_t_.resize(n);
        gamma_s_.resize(n);
        gamma_ss_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            kappa_t_[i] = bracket(curve_.d(1, i), curve_.d(3, i));
            s_t_[i] = std::cbrt(kappa_[i]);
            gamma_s_[i] = curve_.d(1, i) / s_t_[i];
        }
        const auto xi = affine_normal(curve_, tol);
        std::copy(xi.begin(), xi.end(), gamma_ss_.begin());
        mu_ = affine_curvature(curve_, tol);
        const double tail = spectral::trailing_spectrum(mu_);
        if (tail > tol.undersampling)
            throw NumericalError("affine curvature is undersampled at n = " + std::to_string(n) +
                                 " (trailing spectrum " + std::to_string(tail) + "); increase the sample count");
        auto [d1, d2, d3] = mu_derivatives(mu_, s_t_, tol);
        mu_s_ = std::move(d1);
        mu_ss_ = std::move(d2);
        mu_sss_ = std::move(d3);
        auto arc = spectral::antiderivative(s_t_, tol.spectral_floor);
        s_ = std::move(arc.values);
        length_ = arc.period_integral;
        build_interpolants();
    }

    std::size_t size() const { return curve_.size(); }
    double spacing() const { return curve_.spacing(); }
    double t(std::size_t i) const { return curve_.t(i); }
    double length() const { return length_; }
    bool reversed() const { return reversed_; }
    const Tolerances& tolerances() const { return tol_; }
    const SampledCurve& curve() const { return curve_; }

    const std::vector<double>& s() const { return s_; }
    const std::vector<double>& kappa() const { return kappa_; }
    const std::vector<double>& kappa_t() const { return kappa_t_; }
    const std::vector<double>& mu() const { return mu_; }
    const std::vector<double>& mu_s() const { return mu_s_; }
    const std::vector<double>& mu_ss() const { return mu_ss_; }
    const std::vector<double>& mu_sss() const { return mu_sss_; }
    const std::vector<Vec2>& gamma_s() const { return gamma_s_; }
    const std::vector<Vec2>& gamma_ss() const { return gamma_ss_; }

    AffineJet at(std::size_t i) const {
        return {t(i), s_[i], s_t_[i], curve_.d(0, i), gamma_s_[i], gamma_ss_[i],
                mu_[i], mu_s_[i], mu_ss_[i], mu_sss_[i]};
    }

    /// Jets at an arbitrary parameter by trigonometric interpolation of the tabulated columns.
    AffineJet evaluate(double t) const {
        AffineJet j;
        j.t = t;
        j.s = arclength_at(t);
        j.s_t = st_(t);
        j.gamma = Vec2(x_(t), y_(t));
        j.gamma_s = Vec2(xs_(t), ys_(t));
        j.gamma_ss = Vec2(xss_(t), yss_(t));
        j.mu = mu_f_(t);
        j.mu_s = mu_s_f_(t);
        j.mu_ss = mu_ss_f_(t);
        j.mu_sss = mu_sss_f_(t);
        return j;
    }

    /// (μ, μ_s) only; the hot path of root finding.
    std::pair<double, double> mu_and_mu_s(double t) const { return {mu_f_(t), mu_s_f_(t)}; }
    double s_t(double t) const { return st_(t); }

    /// Unwrapped affine arclength at parameter t (s(0) = 0).
    double arclength_at(double t) const { return length_ / kTwoPi * t + s_periodic_(t) - s_periodic_(0.0); }

    /// Parameter t ∈ [0, 2π) with s(t) ≡ s modulo the affine length.
    double parameter_at(double s) const {
        double target = std::fmod(s, length_);
        if (target < 0.0) target += length_;
        double lo = 0.0, hi = kTwoPi;
        double t = kTwoPi * target / length_;
        for (int it = 0; it < 100; ++it) {
            const double r = arclength_at(t) - target;
            if (std::abs(r) <= 1e-14 * length_) break;
            if (r > 0.0) hi = t;
            else lo = t;
            double next = t - r / st_(t);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            t = next;
        }
        return t;
    }

    /// max of sup|μ|, sup|μ_s|, sup|μ_ss|, sup|μ_sss|; the normaliser of classification thresholds.
    double mu_scale() const {
        double m = 0.0;
        for (const auto* col : {&mu_, &mu_s_, &mu_ss_, &mu_sss_})
            for (double v : *col) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void build_interpolants() {
        const std::size_t n = size();
        const double floor = tol_.spectral_floor;
        std::vector<double> buf(n);
        auto series = [&](auto&& f) {
            for (std::size_t i = 0; i < n; ++i) buf[i] = f(i);
            return spectral::FourierSeries(buf, floor);
        };
        x_ = series([&](std::size_t i) { return curve_.d(0, i).x(); });
        y_ = series([&](std::size_t i) { return curve_.d(0, i).y(); });
        xs_ = series([&](std::size_t i) { return gamma_s_[i].x(); });
        ys_ = series([&](std::size_t i) { return gamma_s_[i].y(); });
        xss_ = series([&](std::size_t i) { return gamma_ss_[i].x(); });
        yss_ = series([&](std::size_t i) { return gamma_ss_[i].y(); });
        mu_f_ = series([&](std::size_t i) { return mu_[i]; });
        mu_s_f_ = series([&](std::size_t i) { return mu_s_[i]; });
        mu_ss_f_ = series([&](std::size_t i) { return mu_ss_[i]; });
        mu_sss_f_ = series([&](std::size_t i) { return mu_sss_[i]; });
        st_ = series([&](std::size_t i) { return s_t_[i]; });
        s_periodic_ = series([&](std::size_t i) { return s_[i] - length_ / kTwoPi * t(i); });
    }

    Tolerances tol_;
    SampledCurve curve_;
    bool reversed_ = false;
    double length_ = 0.0;
    std::vector<double> s_, s_t_, kappa_, kappa_t_, mu_, mu_s_, mu_ss_, mu_sss_;
    std::vector<Vec2> gamma_s_, gamma_ss_;
    spectral::FourierSeries x_, y_, xs_, ys_, xss_, yss_, mu_f_, mu_s_f_, mu_ss_f_, mu_sss_f_, st_, s_periodic_;
};

inline MuDerivatives mu_derivatives(const AffineJetTable& jets) {
    return {jets.mu_s(), jets.mu_ss(), jets.mu_sss()};
}

}  // namespace affevo
