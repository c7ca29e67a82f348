#pragma once

// Fourier tools for 2π-periodic samples on a uniform grid t_i = 2πi/n.

#include "affevo/types.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace affevo::spectral {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Signed wavenumber of FFT bin j in a length-n transform (Nyquist reported as +n/2).
inline long wavenumber(std::size_t j, std::size_t n) {
    return j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

/// Normalised coefficients c_k with f(t_i) = Σ c_k e^{ikt_i}.
inline std::vector<cplx> coefficients(std::span<const double> f) {
    Eigen::FFT<double> fft;
    std::vector<double> in(f.begin(), f.end());
    std::vector<cplx> out;
    fft.fwd(out, in);
    const double inv_n = 1.0 / static_cast<double>(f.size());
    for (auto& c : out) c *= inv_n;
    return out;
}

inline std::vector<double> synthesize(const std::vector<cplx>& coeffs) {
    Eigen::FFT<double> fft;
    std::vector<cplx> scaled(coeffs);
    const double n = static_cast<double>(coeffs.size());
    for (auto& c : scaled) c *= n;
    std::vector<double> out;
    fft.inv(out, scaled);
    return out;
}

/// Zero every coefficient whose magnitude is below `relative_floor` times the largest one.
inline void chop(std::vector<cplx>& coeffs, double relative_floor) {
    double peak = 0.0;
    for (const auto& c : coeffs) peak = std::max(peak, std::abs(c));
    const double cut = relative_floor * peak;
    for (auto& c : coeffs)
        if (std::abs(c) < cut) c = 0.0;
}

/// Largest coefficient magnitude in the top quarter of the band (|k| ≥ 3n/8), relative to the peak.
inline double trailing_spectrum(std::span<const double> f) {
    const auto coeffs = coefficients(f);
    const std::size_t n = coeffs.size();
    double peak = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double m = std::abs(coeffs[j]);
        peak = std::max(peak, m);
        if (std::labs(wavenumber(j, n)) * 8 >= static_cast<long>(3 * n)) tail = std::max(tail, m);
    }
    return peak > 0.0 ? tail / peak : 0.0;
}

/// d^order f / dt^order of periodic samples. The Nyquist mode is dropped.
inline std::vector<double> derivative(std::span<const double> f, int order,
                                      double relative_floor = 1e-13) {
    if (order == 0) return {f.begin(), f.end()};
    auto coeffs = coefficients(f);
    chop(coeffs, relative_floor);
    const std::size_t n = coeffs.size();
    const cplx i_unit(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const long k = wavenumber(j, n);
        if (n % 2 == 0 && j == n / 2) {
            coeffs[j] = 0.0;
            continue;
        }
        coeffs[j] *= std::pow(i_unit * static_cast<double>(k), order);
    }
    return synthesize(coeffs);
}

/// Trigonometric interpolation of `f` onto a uniform grid of m ≥ f.size() nodes.
inline std::vector<double> resample(std::span<const double> f, std::size_t m) {
    const auto coeffs = coefficients(f);
    const std::size_t n = coeffs.size();
    std::vector<cplx> padded(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const long k = wavenumber(j, n);
        if (n % 2 == 0 && j == n / 2 && m > n) {
            // split the Nyquist mode symmetrically between ±n/2
            padded[static_cast<std::size_t>(k)] += 0.5 * coeffs[j];
            padded[m - static_cast<std::size_t>(k)] += 0.5 * coeffs[j];
            continue;
        }
        const std::size_t dst = k >= 0 ? static_cast<std::size_t>(k) : m - static_cast<std::size_t>(-k);
        padded[dst] += coeffs[j];
    }
    return synthesize(padded);
}

/// Periodic quadrature ∫_0^{t_i} f: returns node values and the full-period integral.
struct Antiderivative {
    std::vector<double> values;
    double period_integral = 0.0;
};

inline Antiderivative antiderivative(std::span<const double> f, double relative_floor = 1e-13) {
    auto coeffs = coefficients(f);
    chop(coeffs, relative_floor);
    const std::size_t n = coeffs.size();
    const double mean = coeffs[0].real();
    std::vector<cplx> periodic(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        if (n % 2 == 0 && j == n / 2) continue;
        periodic[j] = coeffs[j] / cplx(0.0, static_cast<double>(wavenumber(j, n)));
    }
    auto p = synthesize(periodic);
    Antiderivative out;
    out.values.resize(n);
    const double h = kTwoPi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = mean * h * static_cast<double>(i) + p[i] - p[0];
    out.period_integral = mean * kTwoPi;
    return out;
}

/// Real trigonometric series evaluable (with derivatives) at any t.
class FourierSeries {
public:
    FourierSeries() = default;

    explicit FourierSeries(std::span<const double> samples, double relative_floor = 1e-13) {
        auto coeffs = coefficients(samples);
        chop(coeffs, relative_floor);
        const std::size_t n = coeffs.size();
        const std::size_t half = n / 2;
        coeffs_.assign(coeffs.begin(), coeffs.begin() + static_cast<long>(half));
        if (n % 2 == 0) nyquist_ = coeffs[half].real();
        else coeffs_.push_back(coeffs[half]);
        while (coeffs_.size() > 1 && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
        nyquist_k_ = static_cast<double>(half);
    }

    /// d^order/dt^order of the series at t.
    double operator()(double t, int order = 0) const {
        if (coeffs_.empty()) return 0.0;
        double acc = order == 0 ? coeffs_[0].real() : 0.0;
        const cplx step = std::polar(1.0, t);
        cplx phase = step;
        for (std::size_t k = 1; k < coeffs_.size(); ++k) {
            cplx term = coeffs_[k] * phase;
            if (order > 0) term *= std::pow(cplx(0.0, static_cast<double>(k)), order);
            acc += 2.0 * term.real();
            phase *= step;
        }
        if (order == 0 && nyquist_ != 0.0) acc += nyquist_ * std::cos(nyquist_k_ * t);
        return acc;
    }

    std::size_t bandwidth() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

private:
    std::vector<cplx> coeffs_;
    double nyquist_ = 0.0;
    double nyquist_k_ = 0.0;
};

}  // namespace affevo::spectral
