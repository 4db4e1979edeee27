// Minimal tour of the library: evaluates the closed-form predictions at the
// default natural-unit parameters, cross-checks the classical amplitude
// against an integrated trajectory, and prints the measurement crossover.
#include <iostream>

#include "beamosc/classical.hpp"
#include "beamosc/perturbation.hpp"
#include "beamosc/twoparticle.hpp"

int main() {
    using namespace beamosc;

    ModelParams params; // hbar = omega0 = m = 1, mu = 100, alpha = 1, v = 7
    const WindowFunction window = WindowFunction::gaussian(10.0);

    const double ym = classical_amplitude_analytic(params, window);
    std::cout << "closed-form oscillation amplitude y_m = " << ym << "\n";

    const double t_half = default_half_span(params, window);
    const ClassicalState initial{-t_half, -params.v * t_half, params.m * params.v, 0.0, 0.0};
    const ClassicalTrajectory traj = integrate_classical(params, window, initial, 1e-3, t_half);
    std::cout << "measured from a trajectory:          "
              << measure_post_passage_amplitude(traj, params, window) << "\n";

    const TransitionResult driven = p1_partial(params, window);
    const TransitionResult scattering = p1_full(params, window, params.beam_wavenumber());
    std::cout << "excitation probability, driven oscillator:  " << driven.p1 << "\n";
    std::cout << "excitation probability, beam scattering:    " << scattering.p1 << "\n";

    const FinalStateAmplitudes state =
        build_final_state(params, window, params.beam_wavenumber());
    std::cout << "reduced <y> oscillation amplitude:          " << reduced_amplitude(state, params)
              << "\n";
    std::cout << "posterior branch crossover at y' = " << crossover_position(state, params)
              << "\n";
    return 0;
}
