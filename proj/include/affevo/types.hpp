#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace affevo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Determinant [u, v] of two plane vectors.
inline double bracket(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

// Error hierarchy. The CLI maps each class onto a stable exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad spec, bad sample count, parameter out of range.
class InputError : public Error {
public:
    using Error::Error;
};

/// The curve has (numerically) an affine inflexion: [γ_t, γ_tt] vanishes or changes sign.
class InflexionError : public Error {
public:
    InflexionError(const std::string& what, double min_abs_kappa)
        : Error(what), min_abs_kappa_(min_abs_kappa) {}
    double min_abs_kappa() const noexcept { return min_abs_kappa_; }

private:
    double min_abs_kappa_;
};

/// Numerical breakdown: undersampled spectrum, vanishing denominator, no convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

struct Tolerances {
    double inflexion = 1e-8;       // absolute cutoff on |κ|
    double root = 1e-8;            // |g| accepted at a singular point
    double classification = 1e-6;  // τ_c, scaled by the curve's μ-derivative sup norms
    double denominator = 1e-12;    // smallest admissible (1-α)² + μα²
    double spectral_floor = 1e-13; // relative Fourier magnitude treated as round-off
    double undersampling = 1e-8;   // relative trailing-spectrum magnitude that flags aliasing
};

}  // namespace affevo
