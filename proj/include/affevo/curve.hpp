#pragma once

// Closed plane curves: declarative specs, uniform sampling, derivatives up to order 5.

#include "affevo/spectral.hpp"
#include "affevo/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace affevo {

struct Ellipse {
    double a = 1.0;
    double b = 1.0;
};

/// One term c·cos(kt) + s·sin(kt).
struct Harmonic {
    int k = 0;
    double c = 0.0;
    double s = 0.0;
};

struct TrigPolynomial {
    std::vector<Harmonic> x;
    std::vector<Harmonic> y;
};

/// Uniform samples of a closed curve over one period; the first point is not repeated.
struct SampledClosed {
    std::vector<Vec2> points;
};

using CurveSpec = std::variant<Ellipse, TrigPolynomial, SampledClosed>;

inline constexpr int kMaxDerivative = 5;
inline constexpr std::size_t kMinClosedSamples = 16;

namespace detail {

inline bool has_nonzero_term(const std::vector<Harmonic>& terms) {
    return std::any_of(terms.begin(), terms.end(),
                       [](const Harmonic& h) { return h.k > 0 && (h.c != 0.0 || h.s != 0.0); });
}

// m-th derivative of c·cos(kt) + s·sin(kt) = Re((c - i s)(ik)^m e^{ikt}).
inline double harmonic_derivative(const Harmonic& h, int m, double t) {
    using cplx = std::complex<double>;
    if (h.k == 0) return m == 0 ? h.c : 0.0;
    const double k = static_cast<double>(h.k);
    const cplx w = cplx(h.c, -h.s) * std::pow(cplx(0.0, k), m) * std::polar(1.0, k * t);
    return w.real();
}

}  // namespace detail

inline void validate(const CurveSpec& spec) {
    struct Visitor {
        void operator()(const Ellipse& e) const {
            if (!(e.a > 0.0) || !(e.b > 0.0)) throw InputError("ellipse semi-axes must be positive");
        }
        void operator()(const TrigPolynomial& p) const {
            for (const auto* terms : {&p.x, &p.y})
                for (const auto& h : *terms)
                    if (h.k < 0) throw InputError("trigonometric harmonics must be non-negative");
            if (!detail::has_nonzero_term(p.x) || !detail::has_nonzero_term(p.y))
                throw InputError("each coordinate needs at least one nonzero harmonic");
        }
        void operator()(const SampledClosed& s) const {
            if (s.points.size() < kMinClosedSamples)
                throw InputError("sampled curve needs at least 16 points");
            if ((s.points.front() - s.points.back()).norm() == 0.0)
                throw InputError("sampled curve repeats its first point at the end");
        }
    };
    std::visit(Visitor{}, spec);
}

inline TrigPolynomial to_trig_polynomial(const Ellipse& e) {
    return TrigPolynomial{{{1, e.a, 0.0}}, {{1, 0.0, e.b}}};
}

/// (cos 2t − cos(t + phase), sin 2t + sin t): a two-harmonic closed curve with affine vertices.
inline TrigPolynomial two_harmonic_curve(double phase) {
    return TrigPolynomial{{{2, 1.0, 0.0}, {1, -std::cos(phase), std::sin(phase)}},
                          {{2, 0.0, 1.0}, {1, 0.0, 1.0}}};
}

/// Image of a trigonometric curve under x ↦ Mx + b.
inline TrigPolynomial affine_image(const TrigPolynomial& p, const Mat2& m, const Vec2& b) {
    std::map<int, std::pair<Vec2, Vec2>> by_k;  // k -> (cos coefficient vector, sin coefficient vector)
    auto entry = [&](int k) -> std::pair<Vec2, Vec2>& {
        return by_k.try_emplace(k, Vec2::Zero(), Vec2::Zero()).first->second;
    };
    for (const auto& h : p.x) {
        auto& e = entry(h.k);
        e.first.x() += h.c;
        e.second.x() += h.s;
    }
    for (const auto& h : p.y) {
        auto& e = entry(h.k);
        e.first.y() += h.c;
        e.second.y() += h.s;
    }
    entry(0);
    TrigPolynomial out;
    for (auto& [k, cs] : by_k) {
        Vec2 c = m * cs.first;
        const Vec2 s = m * cs.second;
        if (k == 0) c += b;
        out.x.push_back({k, c.x(), s.x()});
        out.y.push_back({k, c.y(), s.y()});
    }
    return out;
}

/// Uniformly sampled curve with parameter derivatives d[k], k = 0..5. Immutable.
class SampledCurve {
public:
    using Table = std::array<std::vector<Vec2>, kMaxDerivative + 1>;

    explicit SampledCurve(Table derivatives) : d_(std::move(derivatives)) {}

    std::size_t size() const { return d_[0].size(); }
    double spacing() const { return kTwoPi / static_cast<double>(size()); }
    double t(std::size_t i) const { return spacing() * static_cast<double>(i); }

    /// k-th parameter derivative at node i.
    const Vec2& d(int k, std::size_t i) const { return d_[static_cast<std::size_t>(k)][i]; }
    const std::vector<Vec2>& derivative(int k) const { return d_[static_cast<std::size_t>(k)]; }

    /// Same curve traversed backwards: node j ↦ γ(−t_j), derivatives signed by (−1)^k.
    SampledCurve reversed() const {
        const std::size_t n = size();
        Table r;
        for (int k = 0; k <= kMaxDerivative; ++k) {
            auto& dst = r[static_cast<std::size_t>(k)];
            dst.resize(n);
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            for (std::size_t j = 0; j < n; ++j) dst[j] = sign * d(k, (n - j) % n);
        }
        return SampledCurve(std::move(r));
    }

private:
    Table d_;
};

namespace detail {

inline SampledCurve sample_trig(const TrigPolynomial& p, std::size_t n) {
    SampledCurve::Table d;
    const double h = kTwoPi / static_cast<double>(n);
    for (int k = 0; k <= kMaxDerivative; ++k) {
        auto& col = d[static_cast<std::size_t>(k)];
        col.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = h * static_cast<double>(i);
            double x = 0.0, y = 0.0;
            for (const auto& term : p.x) x += harmonic_derivative(term, k, t);
            for (const auto& term : p.y) y += harmonic_derivative(term, k, t);
            col[i] = Vec2(x, y);
        }
    }
    return SampledCurve(std::move(d));
}

inline SampledCurve sample_points(const SampledClosed& s, std::size_t n, const Tolerances& tol) {
    const std::size_t m = s.points.size();
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = s.points[i].x();
        ys[i] = s.points[i].y();
    }
    for (const auto* coord : {&xs, &ys}) {
        const double tail = spectral::trailing_spectrum(*coord);
        if (tail > tol.undersampling)
            throw NumericalError("sampled curve is undersampled: trailing spectrum " +
                                 std::to_string(tail) + " exceeds noise threshold");
    }
    const auto x = spectral::resample(xs, n);
    const auto y = spectral::resample(ys, n);
    SampledCurve::Table d;
    for (int k = 0; k <= kMaxDerivative; ++k) {
        const auto dx = spectral::derivative(x, k, tol.spectral_floor);
        const auto dy = spectral::derivative(y, k, tol.spectral_floor);
        auto& col = d[static_cast<std::size_t>(k)];
        col.resize(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = Vec2(dx[i], dy[i]);
    }
    return SampledCurve(std::move(d));
}

}  // namespace detail

/// Samples `spec` at n uniform nodes on [0, 2π) with derivatives up to order 5.
/// Analytic specs are differentiated term by term; sampled input spectrally.
inline SampledCurve sample_curve(const CurveSpec& spec, std::size_t n, const Tolerances& tol = {}) {
    if (!spectral::is_power_of_two(n)) throw InputError("sample count must be a power of two");
    validate(spec);
    if (const auto* e = std::get_if<Ellipse>(&spec)) {
        if (n < 64) throw InputError("analytic curves need at least 64 samples");
        return detail::sample_trig(to_trig_polynomial(*e), n);
    }
    if (const auto* p = std::get_if<TrigPolynomial>(&spec)) {
        if (n < 64) throw InputError("analytic curves need at least 64 samples");
        return detail::sample_trig(*p, n);
    }
    const auto& s = std::get<SampledClosed>(spec);
    if (n < s.points.size()) throw InputError("sample count below the number of input points");
    return detail::sample_points(s, n, tol);
}

/// min over the grid of |[γ_t, γ_tt]|; values below the inflexion threshold reject the curve.
/// A sign change between neighbouring nodes reports 0, the minimum of the continuous bracket.
inline double check_no_inflexions(const SampledCurve& curve) {
    double lo = std::numeric_limits<double>::infinity();
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double k0 = bracket(curve.d(1, i), curve.d(2, i));
        const double k1 = bracket(curve.d(1, (i + 1) % n), curve.d(2, (i + 1) % n));
        if ((k0 < 0.0 && k1 > 0.0) || (k0 > 0.0 && k1 < 0.0)) return 0.0;
        lo = std::min(lo, std::abs(k0));
    }
    return lo;
}

}  // namespace affevo
