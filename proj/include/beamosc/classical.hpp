#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "beamosc/errors.hpp"
#include "beamosc/model.hpp"

namespace beamosc {

struct ClassicalState {
    double t = 0.0;
    double x = 0.0;
    double px = 0.0;
    double y = 0.0;
    double py = 0.0;
};

struct ClassicalTrajectory {
    std::vector<ClassicalState> states;
    std::vector<double> energy; // total H per stored state
    double dt = 0.0;
};

struct WorkTransfer {
    double on_oscillator = 0.0;
    double on_beam = 0.0; // equal magnitude, opposite sign
};

inline double classical_hamiltonian(const ModelParams& p, const WindowFunction& f,
                                    const ClassicalState& s) {
    return s.px * s.px / (2.0 * p.m) + s.py * s.py / (2.0 * p.mu) +
           0.5 * p.mu * p.omega0 * p.omega0 * s.y * s.y - p.alpha * s.y * f.eval(s.x);
}

// Default integration half-span: long enough that the window has decayed to
// well under 1e-12 of its peak at both ends for the gaussian kind.
inline double default_half_span(const ModelParams& p, const WindowFunction& f) {
    if (f.kind() == WindowFunction::Kind::gaussian) {
        return 20.0 * f.b() / std::abs(p.v);
    }
    return 2.0 * f.support_halfwidth(1e-14) / std::abs(p.v);
}

namespace detail {

struct Derivatives {
    double dx, dpx, dy, dpy;
};

inline Derivatives classical_rhs(const ModelParams& p, const WindowFunction& f,
                                 const ClassicalState& s) {
    return {s.px / p.m,
            p.alpha * s.y * f.deriv(s.x),
            s.py / p.mu,
            -p.mu * p.omega0 * p.omega0 * s.y + p.alpha * f.eval(s.x)};
}

} // namespace detail

// Integrates the coupled beam/oscillator equations of motion with the
// Euler-Richardson (midpoint) scheme, storing every step plus the energy.
inline ClassicalTrajectory integrate_classical(const ModelParams& p, const WindowFunction& f,
                                               const ClassicalState& initial, double dt,
                                               double t_end) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("dt must be positive and finite");
    if (!(initial.t < t_end)) throw config_error("integration span is empty (initial.t >= t_end)");
    if (p.alpha != 0.0 && f.eval(initial.x) > 1e-12 * f.peak()) {
        throw config_error("initial beam position must start outside the interaction window");
    }

    const auto steps = static_cast<std::size_t>(std::llround((t_end - initial.t) / dt));
    if (steps < 1) throw config_error("integration span shorter than one time step");

    ClassicalTrajectory traj;
    traj.dt = dt;
    traj.states.reserve(steps + 1);
    traj.energy.reserve(steps + 1);

    ClassicalState s = initial;
    traj.states.push_back(s);
    traj.energy.push_back(classical_hamiltonian(p, f, s));

    for (std::size_t i = 0; i < steps; ++i) {
        const auto k1 = detail::classical_rhs(p, f, s);
        ClassicalState mid{s.t + 0.5 * dt, s.x + 0.5 * dt * k1.dx, s.px + 0.5 * dt * k1.dpx,
                           s.y + 0.5 * dt * k1.dy, s.py + 0.5 * dt * k1.dpy};
        const auto k2 = detail::classical_rhs(p, f, mid);
        s.x += dt * k2.dx;
        s.px += dt * k2.dpx;
        s.y += dt * k2.dy;
        s.py += dt * k2.dpy;
        s.t = initial.t + static_cast<double>(i + 1) * dt;
        if (!std::isfinite(s.x) || !std::isfinite(s.px) || !std::isfinite(s.y) ||
            !std::isfinite(s.py)) {
            throw numeric_error("integration diverged at step " + std::to_string(i + 1) +
                                " (t = " + std::to_string(s.t) + ")");
        }
        traj.states.push_back(s);
        traj.energy.push_back(classical_hamiltonian(p, f, s));
    }
    return traj;
}

// Closed-form post-passage oscillation amplitude y_m driven by f(v*t):
// sqrt(2*pi) * alpha / (mu * omega0) * |temporal_ft(omega0)|.
inline double classical_amplitude_analytic(const ModelParams& p, const WindowFunction& f) {
    if (p.alpha == 0.0) return 0.0;
    const double ft = std::abs(f.temporal_ft(p.v, p.omega0));
    return std::sqrt(2.0 * std::numbers::pi) * std::abs(p.alpha) / (p.mu * p.omega0) * ft;
}

// Closed-form energy transferred to the oscillator by one passage,
// W = pi * alpha^2 / mu * |temporal_ft(omega0)|^2; the beam loses the same amount.
inline WorkTransfer work_on_oscillator_analytic(const ModelParams& p, const WindowFunction& f) {
    if (p.alpha == 0.0) return {0.0, 0.0};
    const double ft = std::abs(f.temporal_ft(p.v, p.omega0));
    const double w = std::numbers::pi * p.alpha * p.alpha / p.mu * ft * ft;
    return {w, -w};
}

// Work done on the beam by the coupling force along an integrated trajectory,
// evaluated by trapezoid. Serves as the numerical cross-check of the closed form.
inline double work_on_beam_numeric(const ClassicalTrajectory& traj, const ModelParams& p,
                                   const WindowFunction& f) {
    if (traj.states.size() < 2) throw numeric_error("trajectory too short for the work integral");
    const double cutoff = 1e-12 * f.peak();
    if (f.eval(traj.states.front().x) > cutoff || f.eval(traj.states.back().x) > cutoff) {
        throw numeric_error("trajectory does not span the full interaction window; "
                            "work integral would be truncated");
    }
    // Integrand: force on the beam, alpha * y * f'(x), times beam velocity.
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& s = traj.states[i];
        const double cur = p.alpha * s.y * f.deriv(s.x) * (s.px / p.m);
        if (i > 0) acc += 0.5 * traj.dt * (prev + cur);
        prev = cur;
    }
    return acc;
}

// Post-passage oscillation amplitude measured from a trajectory: least-squares
// fit of y(t) to A*cos(omega0 t) + B*sin(omega0 t) over the trailing window
// where the coupling has decayed (at most the final 10 oscillation periods).
inline double measure_post_passage_amplitude(const ClassicalTrajectory& traj,
                                             const ModelParams& p, const WindowFunction& f) {
    if (traj.states.size() < 3) throw numeric_error("trajectory too short for an amplitude fit");
    const double cutoff = 1e-12 * f.peak();
    std::size_t start = traj.states.size();
    for (std::size_t i = traj.states.size(); i-- > 0;) {
        if (f.eval(traj.states[i].x) > cutoff) break;
        start = i;
    }
    if (start >= traj.states.size() - 2) {
        throw numeric_error("window has not decayed before the end of the trajectory; "
                            "cannot measure a free oscillation amplitude");
    }
    const double t_end = traj.states.back().t;
    const double fit_span = 10.0 * 2.0 * std::numbers::pi / p.omega0;
    const double t_fit = std::max(traj.states[start].t, t_end - fit_span);
    while (start < traj.states.size() && traj.states[start].t < t_fit) ++start;

    double scc = 0.0, scs = 0.0, sss = 0.0, scy = 0.0, ssy = 0.0;
    for (std::size_t i = start; i < traj.states.size(); ++i) {
        const double c = std::cos(p.omega0 * traj.states[i].t);
        const double s = std::sin(p.omega0 * traj.states[i].t);
        scc += c * c;
        scs += c * s;
        sss += s * s;
        scy += c * traj.states[i].y;
        ssy += s * traj.states[i].y;
    }
    const double det = scc * sss - scs * scs;
    if (std::abs(det) < 1e-12 * scc * sss) {
        throw numeric_error("amplitude fit is ill-conditioned (post-passage span too short)");
    }
    const double a = (sss * scy - scs * ssy) / det;
    const double b = (scc * ssy - scs * scy) / det;
    return std::hypot(a, b);
}

} // namespace beamosc
