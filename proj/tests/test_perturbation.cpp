#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "beamosc/classical.hpp"
#include "beamosc/model.hpp"
#include "beamosc/perturbation.hpp"

using namespace beamosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("first-order coefficient reproduces analytic transition integrals") {
    // Constant element M over [-T, T]: c = -(i/hbar) M 2 sin(w T) / w.
    const double m_el = 0.3, omega = 1.7, t_half = 2.0, hbar = 1.0;
    const auto c1 = first_order_coefficient(
        [&](double) { return std::complex<double>(m_el, 0.0); }, omega, -t_half, t_half, hbar);
    const double expect = -m_el * 2.0 * std::sin(omega * t_half) / omega;
    REQUIRE_THAT(c1.real(), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(c1.imag(), WithinRel(expect, 1e-10));

    // Gaussian element exp(-t^2): integral is sqrt(pi) exp(-w^2/4).
    const auto c2 = first_order_coefficient(
        [](double t) { return std::complex<double>(std::exp(-t * t), 0.0); }, omega, -30.0, 30.0,
        hbar);
    const double gauss = std::sqrt(std::numbers::pi) * std::exp(-omega * omega / 4.0);
    REQUIRE_THAT(c2.imag(), WithinRel(-gauss, 1e-9));
}

TEST_CASE("driven-oscillator excitation probability at the reference point") {
    const ModelParams p;
    const WindowFunction f = WindowFunction::gaussian(10.0);
    const auto r = p1_partial(p, f);

    REQUIRE_THAT(r.p1, WithinRel(1.1554899231240831e-6, 1e-14));
    REQUIRE(r.warnings.empty());
    REQUIRE(r.omega_fi == p.omega0);

    // |coefficient|^2 is the probability; the phase is computed by quadrature
    // and lands on +i for a positive coupling (even real window).
    REQUIRE_THAT(std::norm(r.coefficient), WithinRel(r.p1, 1e-12));
    REQUIRE_THAT(std::arg(r.coefficient), WithinAbs(1.5707963267948966, 1e-9));
}

TEST_CASE("one quantum of excitation carries the classical energy transfer") {
    const ModelParams p;
    const WindowFunction f = WindowFunction::gaussian(10.0);
    const double w_classical = work_on_oscillator_analytic(p, f).on_oscillator;
    const double p1 = p1_partial(p, f).p1;
    REQUIRE_THAT(p1 * p.hbar * p.omega0, WithinRel(w_classical, 1e-14));
}

TEST_CASE("closed-form probability matches the explicit time integral") {
    const ModelParams p;
    const WindowFunction f = WindowFunction::gaussian(10.0);
    const double element = -p.alpha * std::sqrt(p.hbar / (2.0 * p.mu * p.omega0));
    const double t_half = f.support_halfwidth(1e-14) / p.v;
    const auto c = first_order_coefficient(
        [&](double t) { return std::complex<double>(element * f.eval(p.v * t), 0.0); }, p.omega0,
        -t_half, t_half, p.hbar, 1e-13);
    REQUIRE_THAT(std::norm(c), WithinRel(p1_partial(p, f).p1, 1e-8));
}

TEST_CASE("energy-conserving kinematics at the reference point") {
    const ModelParams p;
    const auto kin = scattered_wavenumber(7.0, p);

    REQUIRE_THAT(kin.k1, WithinRel(6.8556546004010441, 1e-15));
    REQUIRE_THAT(kin.delta_k, WithinRel(-0.14434539959895588, 1e-13));
    REQUIRE_THAT(kin.delta_k_approx, WithinRel(-1.0 / 7.0, 1e-15));
    REQUIRE_THAT(std::abs(kin.delta_k - kin.delta_k_approx),
                 WithinRel(1.4882567418130179e-3, 1e-11));

    // Scattered state sits exactly one oscillator quantum below the beam.
    const double e0 = p.hbar * p.hbar * kin.k0 * kin.k0 / (2.0 * p.m);
    const double e1 = p.hbar * p.hbar * kin.k1 * kin.k1 / (2.0 * p.m);
    REQUIRE_THAT(e1 + p.hbar * p.omega0, WithinRel(e0, 1e-13));

    REQUIRE_THROWS_AS(scattered_wavenumber(0.0, p), config_error);
    REQUIRE_THROWS_AS(scattered_wavenumber(-3.0, p), config_error);
    // Below one quantum of kinetic energy the channel is closed.
    REQUIRE_THROWS_AS(scattered_wavenumber(1.0, p), numeric_error);
}

TEST_CASE("plane-wave treatment at the reference point and its classical limit") {
    const ModelParams p;
    const WindowFunction f = WindowFunction::gaussian(10.0);
    const double k0 = p.m * p.v / p.hbar;

    const auto full = p1_full(p, f, k0);
    REQUIRE_THAT(full.p1, WithinRel(1.1310573168721891e-6, 1e-14));

    const auto partial = p1_partial(p, f);
    const double rel_gap = std::abs(full.p1 - partial.p1) / partial.p1;
    REQUIRE_THAT(rel_gap, WithinRel(0.021144802531757126, 1e-10));

    // Substituting the small-shift momentum transfer reproduces the
    // driven-oscillator probability exactly, not approximately.
    const auto approximated = p1_full(p, f, k0, true);
    REQUIRE(approximated.p1 == partial.p1);
}

TEST_CASE("probabilities depend on the beam speed only through its magnitude") {
    ModelParams forward;
    ModelParams backward;
    backward.v = -forward.v;
    const WindowFunction f = WindowFunction::gaussian(10.0);
    REQUIRE(p1_partial(forward, f).p1 == p1_partial(backward, f).p1);
}

TEST_CASE("uncoupled system never gets excited") {
    ModelParams p;
    p.alpha = 0.0;
    const WindowFunction f = WindowFunction::gaussian(10.0);
    const auto r = p1_partial(p, f);
    REQUIRE(r.p1 == 0.0);
    REQUIRE(r.coefficient == std::complex<double>(0.0, 0.0));
    REQUIRE(p1_full(p, f, 7.0).p1 == 0.0);
}

TEST_CASE("first-order validity policy: warn past 0.1, refuse past 1") {
    ModelParams p;
    const WindowFunction f = WindowFunction::gaussian(10.0);

    p.alpha = 400.0; // scales p1 by 1.6e5: ~0.18
    const auto warned = p1_partial(p, f);
    REQUIRE(warned.p1 > 0.1);
    REQUIRE(warned.p1 < 1.0);
    REQUIRE_FALSE(warned.warnings.empty());

    p.alpha = 1000.0; // ~1.16: out of regime entirely
    REQUIRE_THROWS_AS(p1_partial(p, f), numeric_error);
}
