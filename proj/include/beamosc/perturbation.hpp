#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "beamosc/errors.hpp"
#include "beamosc/model.hpp"
#include "beamosc/quadrature.hpp"

namespace beamosc {

struct TransitionResult {
    double p1 = 0.0;                      // |coefficient|^2
    std::complex<double> coefficient{0.0, 0.0};
    double omega_fi = 0.0;
    std::vector<std::string> warnings;
};

struct ScatteringKinematics {
    double k0 = 0.0;
    double k1 = 0.0;
    double delta_k = 0.0;        // k1 - k0, exact energy-conserving shift
    double delta_k_approx = 0.0; // -omega0 / v, small-transfer approximation
};

// First-order transition amplitude -(i/hbar) * integral of
// matrix_element(t) * exp(i * omega_fi * t) dt over [t0, t1].
template <typename MatrixElement>
std::complex<double> first_order_coefficient(MatrixElement&& matrix_element, double omega_fi,
                                             double t0, double t1, double hbar,
                                             double abs_tol = 1e-10) {
    const auto integrand = [&](double t) {
        return matrix_element(t) * std::polar(1.0, omega_fi * t);
    };
    const std::complex<double> integral = adaptive_simpson(integrand, t0, t1, abs_tol);
    return std::complex<double>(0.0, -1.0 / hbar) * integral;
}

namespace detail {

// Shared closed form for both quantum treatments: the excitation probability
// written in terms of the spatial transform at a wavenumber shift dk,
// pi * alpha^2 / (hbar * mu * omega0) * (|spatial_ft(dk)| / |v|)^2.
// Routing both treatments through one expression makes their agreement under
// the small-shift substitution exact rather than approximate.
inline double excitation_probability_from_shift(const ModelParams& p, const WindowFunction& f,
                                                double v, double dk) {
    const double amp = std::abs(f.spatial_ft(dk)) / std::abs(v);
    return std::numbers::pi * p.alpha * p.alpha / (p.hbar * p.mu * p.omega0) * amp * amp;
}

// Unit-modulus phase of the first-order coefficient for the driven oscillator,
// evaluated by quadrature. This is the phase factor carried by the scattered
// branch of the final state; it is computed, never assumed.
inline std::complex<double> driven_coefficient_phase(const ModelParams& p,
                                                     const WindowFunction& f, double v) {
    if (p.alpha == 0.0) return {0.0, 0.0};
    const double element = -p.alpha * std::sqrt(p.hbar / (2.0 * p.mu * p.omega0));
    const double t_half = f.support_halfwidth(1e-14) / std::abs(v);
    const auto me = [&](double t) { return std::complex<double>(element * f.eval(v * t), 0.0); };
    const std::complex<double> c =
        first_order_coefficient(me, p.omega0, -t_half, t_half, p.hbar);
    const double mag = std::abs(c);
    if (mag == 0.0) return {0.0, 0.0};
    return c / mag;
}

inline void apply_validity_policy(TransitionResult& r) {
    if (r.p1 > 1.0) {
        throw numeric_error("transition probability " + std::to_string(r.p1) +
                            " exceeds 1; first-order treatment is out of its regime");
    }
    if (r.p1 > 0.1) {
        r.warnings.push_back("transition probability " + std::to_string(r.p1) +
                             " exceeds 0.1; first-order result is unreliable");
    }
}

} // namespace detail

// Excitation probability for the driven-oscillator (partially quantum)
// treatment: the beam acts as the classical drive f(v*t).
inline TransitionResult p1_partial(const ModelParams& p, const WindowFunction& f) {
    TransitionResult r;
    r.omega_fi = p.omega0;
    if (p.alpha == 0.0) return r;
    r.p1 = detail::excitation_probability_from_shift(p, f, p.v, -p.omega0 / p.v);
    r.coefficient = std::sqrt(r.p1) * detail::driven_coefficient_phase(p, f, p.v);
    detail::apply_validity_policy(r);
    return r;
}

// Energy-conserving scattered wavenumber for an incident beam at k0:
// hbar^2 k1^2 / (2m) = hbar^2 k0^2 / (2m) - hbar * omega0.
inline ScatteringKinematics scattered_wavenumber(double k0, const ModelParams& p) {
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw config_error("k0 must be positive and finite");
    const double k1_sq = k0 * k0 - 2.0 * p.m * p.omega0 / p.hbar;
    if (k1_sq < 0.0) {
        throw numeric_error("scattering channel closed at k0 = " + std::to_string(k0) +
                            ": beam kinetic energy is below one oscillator quantum");
    }
    ScatteringKinematics kin;
    kin.k0 = k0;
    kin.k1 = std::sqrt(k1_sq);
    kin.delta_k = kin.k1 - kin.k0;
    kin.delta_k_approx = -p.omega0 / (p.hbar * k0 / p.m);
    return kin;
}

// Excitation probability for the fully quantum treatment: plane-wave beam
// scattering from k0 to the energy-conserving k1. With use_small_shift_approx
// the exact shift k1 - k0 is replaced by -omega0/v, which reproduces the
// driven-oscillator probability identically.
inline TransitionResult p1_full(const ModelParams& p, const WindowFunction& f, double k0,
                                bool use_small_shift_approx = false) {
    const ScatteringKinematics kin = scattered_wavenumber(k0, p);
    TransitionResult r;
    r.omega_fi = p.omega0;
    if (p.alpha == 0.0) return r;
    const double v_beam = p.hbar * k0 / p.m;
    const double dk = use_small_shift_approx ? kin.delta_k_approx : kin.delta_k;
    r.p1 = detail::excitation_probability_from_shift(p, f, v_beam, dk);
    r.coefficient = std::sqrt(r.p1) * detail::driven_coefficient_phase(p, f, v_beam);
    detail::apply_validity_policy(r);
    return r;
}

} // namespace beamosc
