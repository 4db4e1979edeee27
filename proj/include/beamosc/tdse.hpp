#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "beamosc/errors.hpp"
#include "beamosc/model.hpp"
#include "beamosc/quadrature.hpp"

namespace beamosc {

struct Grid1D {
    double y_min = -1.2;
    double y_max = 1.2;
    int n_points = 513;

    double dy() const { return (y_max - y_min) / (n_points - 1); }
    double point(int i) const { return y_min + i * dy(); }

    void validate() const {
        if (n_points < 3) throw config_error("grid needs at least 3 points");
        if (!(y_min < 0.0) || !(y_max > 0.0)) {
            throw config_error("grid must straddle y = 0 (y_min < 0 < y_max)");
        }
    }

    static Grid1D symmetric(double halfwidth, int n) {
        Grid1D g{-halfwidth, halfwidth, n};
        g.validate();
        return g;
    }

    // Wide enough that eigenstate tails are ~1e-30 at the walls; odd point
    // count puts y = 0 exactly on the grid.
    static Grid1D default_for(const ModelParams& p) {
        return symmetric(12.0 * p.oscillator_length(), 513);
    }
};

struct WaveFunction1D {
    Grid1D grid;
    std::vector<std::complex<double>> amp;
    double t = 0.0;

    double norm_squared() const {
        std::vector<double> density(amp.size());
        for (std::size_t i = 0; i < amp.size(); ++i) density[i] = std::norm(amp[i]);
        return trapezoid_uniform(density, grid.dy());
    }

    void normalize() {
        const double n = std::sqrt(norm_squared());
        if (!(n > 0.0)) throw numeric_error("cannot normalize a zero wavefunction");
        for (auto& a : amp) a /= n;
    }
};

inline std::complex<double> inner_product(const WaveFunction1D& bra, const WaveFunction1D& ket) {
    if (bra.amp.size() != ket.amp.size()) {
        throw config_error("inner product requires wavefunctions on the same grid");
    }
    std::vector<std::complex<double>> integrand(bra.amp.size());
    for (std::size_t i = 0; i < bra.amp.size(); ++i) {
        integrand[i] = std::conj(bra.amp[i]) * ket.amp[i];
    }
    return trapezoid_uniform(integrand, bra.grid.dy());
}

// Ground or first excited oscillator eigenstate sampled from the closed form
// and renormalized on the discrete grid.
inline WaveFunction1D ho_eigenstate(int n, const ModelParams& p, const Grid1D& grid) {
    if (n != 0 && n != 1) {
        throw config_error("only eigenstates n = 0 and n = 1 are provided");
    }
    const double sigma = p.oscillator_length();
    if (std::min(-grid.y_min, grid.y_max) < 8.0 * sigma) {
        throw numeric_error("grid too narrow for the oscillator eigenstates; "
                            "tails would be truncated (need 8 sigma half-width)");
    }
    WaveFunction1D psi;
    psi.grid = grid;
    psi.amp.resize(static_cast<std::size_t>(grid.n_points));
    const double norm0 = std::pow(1.0 / (std::numbers::pi * sigma * sigma), 0.25);
    for (int i = 0; i < grid.n_points; ++i) {
        const double y = grid.point(i);
        const double gauss = norm0 * std::exp(-y * y / (2.0 * sigma * sigma));
        psi.amp[static_cast<std::size_t>(i)] =
            (n == 0) ? gauss : std::numbers::sqrt2 * (y / sigma) * gauss;
    }
    psi.normalize();
    return psi;
}

inline double expectation_y(const WaveFunction1D& psi) {
    std::vector<double> integrand(psi.amp.size());
    for (std::size_t i = 0; i < psi.amp.size(); ++i) {
        integrand[i] = std::norm(psi.amp[i]) * psi.grid.point(static_cast<int>(i));
    }
    return trapezoid_uniform(integrand, psi.grid.dy());
}

// Momentum expectation via -i*hbar*d/dy with a 7-point centered stencil.
// The high-order stencil keeps the discrete-commutator error of the
// consistency residual well below the time-differencing error.
inline double expectation_p(const WaveFunction1D& psi, const ModelParams& p) {
    static constexpr double c[3] = {45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
    const auto n = static_cast<std::ptrdiff_t>(psi.amp.size());
    const double dy = psi.grid.dy();
    std::vector<double> integrand(psi.amp.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::complex<double> d{0.0, 0.0};
        for (std::ptrdiff_t k = 1; k <= 3; ++k) {
            const std::complex<double> right = (i + k < n) ? psi.amp[i + k] : 0.0;
            const std::complex<double> left = (i - k >= 0) ? psi.amp[i - k] : 0.0;
            d += c[k - 1] * (right - left);
        }
        integrand[static_cast<std::size_t>(i)] =
            p.hbar * std::imag(std::conj(psi.amp[static_cast<std::size_t>(i)]) * d) / dy;
    }
    return trapezoid_uniform(integrand, dy);
}

inline double overlap_probability(const WaveFunction1D& psi, int n, const ModelParams& p) {
    const WaveFunction1D basis = ho_eigenstate(n, p, psi.grid);
    return std::norm(inner_product(basis, psi));
}

struct StationaryState {
    WaveFunction1D psi;
    double energy = 0.0;
};

namespace detail {

// Thomas solve for a tridiagonal system with constant off-diagonals.
template <typename T>
void solve_tridiagonal_const_off(const std::vector<T>& diag, T off, std::vector<T>& rhs,
                                 std::vector<T>& scratch) {
    const std::size_t n = diag.size();
    scratch.resize(n);
    T d = diag[0];
    rhs[0] /= d;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = off / d;
        d = diag[i] - off * scratch[i];
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / d;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
}

inline void apply_free_hamiltonian(const ModelParams& p, const Grid1D& grid,
                                   const std::vector<double>& x, std::vector<double>& out) {
    const double dy = grid.dy();
    const double kin = p.hbar * p.hbar / (2.0 * p.mu * dy * dy);
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    out.resize(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double y = grid.point(static_cast<int>(i));
        const double left = (i > 0) ? x[i - 1] : 0.0;
        const double right = (i + 1 < n) ? x[i + 1] : 0.0;
        out[i] = kin * (2.0 * x[i] - left - right) +
                 0.5 * p.mu * p.omega0 * p.omega0 * y * y * x[i];
    }
}

} // namespace detail

// Eigenstate of the discretized (free) Hamiltonian by shifted inverse
// iteration, seeded from the sampled closed form. Evolving this state with
// alpha = 0 leaves its density unchanged to machine precision, which the
// sampled analytic eigenstate does not quite do on a finite grid.
inline StationaryState stationary_state(int n, const ModelParams& p, const Grid1D& grid) {
    const WaveFunction1D seed = ho_eigenstate(n, p, grid);
    const double shift = (n + 0.5) * p.hbar * p.omega0;
    const double dy = grid.dy();
    const double kin = p.hbar * p.hbar / (2.0 * p.mu * dy * dy);

    const std::size_t size = seed.amp.size();
    std::vector<double> diag(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double y = grid.point(static_cast<int>(i));
        diag[i] = 2.0 * kin + 0.5 * p.mu * p.omega0 * p.omega0 * y * y - shift;
    }

    std::vector<double> x(size), hx, scratch;
    for (std::size_t i = 0; i < size; ++i) x[i] = seed.amp[i].real();

    double energy = shift;
    bool converged = false;
    for (int iter = 0; iter < 100 && !converged; ++iter) {
        detail::solve_tridiagonal_const_off(diag, -kin, x, scratch);
        double l2 = 0.0;
        for (double xi : x) l2 += xi * xi;
        l2 = std::sqrt(l2);
        for (auto& xi : x) xi /= l2;

        detail::apply_free_hamiltonian(p, grid, x, hx);
        double rayleigh = 0.0, residual = 0.0;
        for (std::size_t i = 0; i < size; ++i) rayleigh += x[i] * hx[i];
        for (std::size_t i = 0; i < size; ++i) {
            const double r = hx[i] - rayleigh * x[i];
            residual += r * r;
        }
        converged = std::sqrt(residual) < 1e-12 * std::abs(rayleigh);
        energy = rayleigh;
    }
    if (!converged) throw numeric_error("inverse iteration for the stationary state did not converge");

    // Match the sign convention of the sampled eigenstate.
    double overlap = 0.0;
    for (std::size_t i = 0; i < size; ++i) overlap += x[i] * seed.amp[i].real();
    const double sign = overlap < 0.0 ? -1.0 : 1.0;

    StationaryState out;
    out.psi.grid = grid;
    out.psi.t = 0.0;
    out.psi.amp.resize(size);
    for (std::size_t i = 0; i < size; ++i) out.psi.amp[i] = sign * x[i];
    out.psi.normalize();
    out.energy = energy;
    return out;
}

enum class Scheme {
    implicit_midpoint, // unconditionally stable, norm-preserving (default)
    leapfrog           // explicit staggered real/imaginary scheme
};

struct EvolutionSample {
    double t = 0.0;
    double p0 = 0.0;
    double p1 = 0.0;
    double y_mean = 0.0;
    double p_mean = 0.0;
    double norm = 0.0;
};

namespace detail {

template <typename Observer>
WaveFunction1D evolve_implicit_midpoint(WaveFunction1D psi, const ModelParams& p,
                                        const WindowFunction& f, double t_end, double dt,
                                        Observer&& observer, int stride) {
    using cd = std::complex<double>;
    const auto steps = static_cast<std::size_t>(std::llround((t_end - psi.t) / dt));
    const double t0 = psi.t;
    const std::size_t size = psi.amp.size();
    const double dy = psi.grid.dy();
    const double kin = p.hbar * p.hbar / (2.0 * p.mu * dy * dy);
    const cd lambda{0.0, dt / (2.0 * p.hbar)};
    const cd off = -lambda * kin;

    std::vector<double> harmonic(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double y = psi.grid.point(static_cast<int>(i));
        harmonic[i] = 0.5 * p.mu * p.omega0 * p.omega0 * y * y;
    }

    std::vector<cd> diag(size), rhs(size), scratch;
    observer(psi);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t_mid = psi.t + 0.5 * dt;
        const double drive = p.alpha * f.eval(p.v * t_mid);
        for (std::size_t i = 0; i < size; ++i) {
            const double y = psi.grid.point(static_cast<int>(i));
            const cd h_diag = lambda * (2.0 * kin + harmonic[i] - drive * y);
            diag[i] = 1.0 + h_diag;
            const cd left = (i > 0) ? psi.amp[i - 1] : cd{};
            const cd right = (i + 1 < size) ? psi.amp[i + 1] : cd{};
            rhs[i] = (1.0 - h_diag) * psi.amp[i] - off * (left + right);
        }
        solve_tridiagonal_const_off(diag, off, rhs, scratch);
        psi.amp.swap(rhs);
        psi.t = t0 + static_cast<double>(step + 1) * dt;

        const double drift = std::abs(psi.norm_squared() - 1.0);
        if (drift > 1e-4) {
            throw numeric_error("norm drift " + std::to_string(drift) + " at step " +
                                std::to_string(step + 1) + "; evolution is unstable");
        }
        if ((step + 1) % static_cast<std::size_t>(stride) == 0 || step + 1 == steps) {
            observer(psi);
        }
    }
    return psi;
}

template <typename Observer>
WaveFunction1D evolve_leapfrog(WaveFunction1D psi, const ModelParams& p, const WindowFunction& f,
                               double t_end, double dt, Observer&& observer, int stride) {
    const auto steps = static_cast<std::size_t>(std::llround((t_end - psi.t) / dt));
    const double t0 = psi.t;
    const std::size_t size = psi.amp.size();
    const double dy = psi.grid.dy();
    const double kin = p.hbar * p.hbar / (2.0 * p.mu * dy * dy);

    double v_max = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double y = psi.grid.point(static_cast<int>(i));
        v_max = std::max(v_max, 0.5 * p.mu * p.omega0 * p.omega0 * y * y +
                                    std::abs(p.alpha) * f.peak() * std::abs(y));
    }
    const double e_max = 4.0 * kin + v_max;
    if (dt >= 2.0 * p.hbar / e_max) {
        throw numeric_error("explicit leapfrog scheme unstable at dt = " + std::to_string(dt) +
                            "; needs dt < " + std::to_string(2.0 * p.hbar / e_max));
    }

    std::vector<double> harmonic(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double y = psi.grid.point(static_cast<int>(i));
        harmonic[i] = 0.5 * p.mu * p.omega0 * p.omega0 * y * y;
    }
    const auto apply_h = [&](const std::vector<double>& x, double t, std::vector<double>& out) {
        const double drive = p.alpha * f.eval(p.v * t);
        const auto n = static_cast<std::ptrdiff_t>(size);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double y = psi.grid.point(static_cast<int>(i));
            const double left = (i > 0) ? x[i - 1] : 0.0;
            const double right = (i + 1 < n) ? x[i + 1] : 0.0;
            out[i] = kin * (2.0 * x[i] - left - right) + (harmonic[i] - drive * y) * x[i];
        }
    };

    // Staggering: real part at integer steps, imaginary part at half steps.
    // Update rules: I(t + dt/2) = I(t - dt/2) - (dt/hbar) H(t) R(t)
    //               R(t + dt)   = R(t) + (dt/hbar) H(t + dt/2) I(t + dt/2)
    std::vector<double> re(size), im_prev(size), im_next(size), h_buf(size);
    for (std::size_t i = 0; i < size; ++i) re[i] = psi.amp[i].real();
    // Back-advance the imaginary part half a step to set up the stagger.
    apply_h(re, t0, h_buf);
    for (std::size_t i = 0; i < size; ++i) {
        im_prev[i] = psi.amp[i].imag() + 0.5 * dt / p.hbar * h_buf[i];
    }

    const auto emit = [&](double t, const std::vector<double>& im_lo,
                          const std::vector<double>& im_hi) {
        WaveFunction1D snap;
        snap.grid = psi.grid;
        snap.t = t;
        snap.amp.resize(size);
        for (std::size_t i = 0; i < size; ++i) {
            snap.amp[i] = {re[i], 0.5 * (im_lo[i] + im_hi[i])};
        }
        observer(snap);
        return snap;
    };

    WaveFunction1D last = psi;
    for (std::size_t step = 0; step <= steps; ++step) {
        const double t = t0 + static_cast<double>(step) * dt;
        apply_h(re, t, h_buf);
        for (std::size_t i = 0; i < size; ++i) im_next[i] = im_prev[i] - dt / p.hbar * h_buf[i];

        // Staggered-product norm, the quantity this scheme conserves.
        double norm = 0.0;
        for (std::size_t i = 0; i < size; ++i) norm += re[i] * re[i] + im_prev[i] * im_next[i];
        norm *= dy;
        if (std::abs(norm - 1.0) > 1e-4) {
            throw numeric_error("norm drift " + std::to_string(std::abs(norm - 1.0)) +
                                " at step " + std::to_string(step) +
                                "; evolution is unstable");
        }
        if (step % static_cast<std::size_t>(stride) == 0 || step == steps) {
            last = emit(t, im_prev, im_next);
        }
        if (step == steps) break;
        apply_h(im_next, t + 0.5 * dt, h_buf);
        for (std::size_t i = 0; i < size; ++i) re[i] += dt / p.hbar * h_buf[i];
        im_prev.swap(im_next);
    }
    return last;
}

} // namespace detail

// Evolves the oscillator wavefunction under the driven Hamiltonian
// H(t) = p^2/(2 mu) + mu omega0^2 y^2 / 2 - alpha y f(v t).
// The observer is called with the state at the start, every `stride` steps,
// and at the end; it must not mutate the state.
template <typename Observer>
WaveFunction1D evolve_tdse(WaveFunction1D psi, const ModelParams& p, const WindowFunction& f,
                           double t_end, double dt, Observer&& observer, int stride = 1,
                           Scheme scheme = Scheme::implicit_midpoint) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("dt must be positive and finite");
    if (!(t_end > psi.t)) throw config_error("evolution span is empty (t_end <= psi.t)");
    if (stride < 1) throw config_error("observer stride must be at least 1");
    psi.grid.validate();
    if (psi.amp.size() != static_cast<std::size_t>(psi.grid.n_points)) {
        throw config_error("wavefunction size does not match its grid");
    }
    if (std::abs(psi.norm_squared() - 1.0) > 1e-6) {
        throw config_error("initial wavefunction is not normalized");
    }
    if (scheme == Scheme::implicit_midpoint) {
        return detail::evolve_implicit_midpoint(std::move(psi), p, f, t_end, dt,
                                                std::forward<Observer>(observer), stride);
    }
    return detail::evolve_leapfrog(std::move(psi), p, f, t_end, dt,
                                   std::forward<Observer>(observer), stride);
}

inline WaveFunction1D evolve_tdse(WaveFunction1D psi, const ModelParams& p,
                                  const WindowFunction& f, double t_end, double dt,
                                  Scheme scheme = Scheme::implicit_midpoint) {
    return evolve_tdse(std::move(psi), p, f, t_end, dt, [](const WaveFunction1D&) {}, 1, scheme);
}

// Largest deviation of d<p>/dt from the expected force -mu omega0^2 <y> + alpha f(v t)
// over a uniformly sampled history, using centered time differences. Interior
// points whose neighbors are not equally spaced (the forced final sample when
// the step count is not a stride multiple) are skipped.
inline double ehrenfest_residual(const std::vector<EvolutionSample>& history,
                                 const ModelParams& p, const WindowFunction& f) {
    if (history.size() < 3) {
        throw numeric_error("consistency residual needs at least 3 history samples");
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < history.size(); ++i) {
        const double dt_left = history[i].t - history[i - 1].t;
        const double dt_right = history[i + 1].t - history[i].t;
        if (std::abs(dt_right - dt_left) > 1e-9 * dt_left) continue;
        const double dpdt = (history[i + 1].p_mean - history[i - 1].p_mean) / (dt_left + dt_right);
        const double force = -p.mu * p.omega0 * p.omega0 * history[i].y_mean +
                             p.alpha * f.eval(p.v * history[i].t);
        worst = std::max(worst, std::abs(dpdt - force));
    }
    return worst;
}

} // namespace beamosc
