#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "beamosc/errors.hpp"
#include "beamosc/model.hpp"
#include "beamosc/perturbation.hpp"

namespace beamosc {

// Post-scattering state of beam and oscillator together, kept as the
// two-branch superposition c0 |k0>|ground> + c1 |k1>|excited>. The branch
// amplitudes are normalized so Born probabilities sum to exactly 1 (the raw
// first-order state has norm^2 = 1 + p1; dividing by sqrt(1 + p1) changes
// probabilities only at order p1^2).
struct FinalStateAmplitudes {
    std::complex<double> c0{1.0, 0.0};
    std::complex<double> c1{0.0, 0.0};
    double k0 = 0.0;
    double k1 = 0.0;
    double e_total = 0.0;
    std::vector<std::string> warnings;
};

enum class Observable { beam_momentum, oscillator_position };
enum class MeasurementOrder { beam_first, oscillator_first };

// Outcome of a single partial projection. `posterior` reuses the two-branch
// container for the unmeasured subsystem: after a beam-momentum measurement it
// holds the collapsed oscillator amplitudes (ground, excited); after an
// oscillator-position measurement it holds the beam amplitudes (k0, k1).
// For a continuous position record the Born weight is a density, not a
// probability, so `probability` stores the scattered-branch weight given the
// recorded position, which is the bounded quantity downstream consumers need.
struct MeasurementOutcome {
    Observable observable = Observable::beam_momentum;
    double value = 0.0;
    double probability = 0.0;
    FinalStateAmplitudes posterior;
};

inline FinalStateAmplitudes build_final_state(const ModelParams& p, const WindowFunction& f,
                                              double k0) {
    const ScatteringKinematics kin = scattered_wavenumber(k0, p);
    const TransitionResult tr = p1_full(p, f, k0);
    if (tr.p1 >= 0.1) {
        throw numeric_error("excitation probability " + std::to_string(tr.p1) +
                            " is outside the perturbative regime (>= 0.1); "
                            "the two-branch final state is not a valid approximation");
    }
    FinalStateAmplitudes s;
    const double norm = std::sqrt(1.0 + tr.p1);
    s.c0 = 1.0 / norm;
    s.c1 = tr.coefficient / norm;
    s.k0 = kin.k0;
    s.k1 = kin.k1;
    s.e_total = p.hbar * p.hbar * k0 * k0 / (2.0 * p.m) + 0.5 * p.hbar * p.omega0;
    s.warnings = tr.warnings;
    return s;
}

struct OscillatorBranches {
    std::complex<double> a0{0.0, 0.0};
    std::complex<double> a1{0.0, 0.0};
};

// Oscillator branch amplitudes after tracing over the beam, with their free
// phase evolution attached.
inline OscillatorBranches reduce_to_oscillator(const FinalStateAmplitudes& s, double t,
                                               const ModelParams& p) {
    return {s.c0 * std::polar(1.0, -0.5 * p.omega0 * t),
            s.c1 * std::polar(1.0, -1.5 * p.omega0 * t)};
}

// <y>(t) of the reduced oscillator state: the ground/excited cross term beats
// at omega0 with amplitude sqrt(2 hbar / (mu omega0)) * |c0 c1|.
inline double reduced_expectation_y(const FinalStateAmplitudes& s, double t,
                                    const ModelParams& p) {
    const OscillatorBranches br = reduce_to_oscillator(s, t, p);
    const double scale = std::sqrt(2.0 * p.hbar / (p.mu * p.omega0));
    return scale * std::real(std::conj(br.a0) * br.a1);
}

inline double reduced_amplitude(const FinalStateAmplitudes& s, const ModelParams& p) {
    return std::sqrt(2.0 * p.hbar / (p.mu * p.omega0)) * std::abs(s.c0) * std::abs(s.c1);
}

namespace detail {

// Scattered-to-unscattered posterior weight ratio at oscillator position y.
// The shared gaussian factor of the two eigenstates cancels exactly, leaving
// r = 2 (|c1|/|c0|)^2 (y/sigma)^2, so no tail underflow can occur.
inline double branch_weight_ratio(const FinalStateAmplitudes& s, double y,
                                  const ModelParams& p) {
    if (std::abs(s.c1) == 0.0) return 0.0;
    if (std::abs(s.c0) == 0.0) return std::numeric_limits<double>::infinity();
    const double sigma = p.oscillator_length();
    const double u = (std::abs(s.c1) / std::abs(s.c0)) * (y / sigma);
    return 2.0 * u * u;
}

} // namespace detail

// Projective measurement of the beam momentum; outcome must be one of the two
// branch wavenumbers. The oscillator collapses to the matching eigenstate.
inline MeasurementOutcome measure_beam_momentum(const FinalStateAmplitudes& s, double outcome) {
    const auto matches = [](double a, double b) {
        return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
    };
    int branch;
    if (matches(outcome, s.k0)) {
        branch = 0;
    } else if (matches(outcome, s.k1)) {
        branch = 1;
    } else {
        throw config_error("measured wavenumber " + std::to_string(outcome) +
                           " is not one of the allowed branch values");
    }
    MeasurementOutcome out;
    out.observable = Observable::beam_momentum;
    out.value = outcome;
    const std::complex<double> amp = branch == 0 ? s.c0 : s.c1;
    out.probability = std::norm(amp);
    out.posterior.k0 = s.k0;
    out.posterior.k1 = s.k1;
    out.posterior.e_total = s.e_total;
    const std::complex<double> phase =
        std::abs(amp) > 0.0 ? amp / std::abs(amp) : std::complex<double>{1.0, 0.0};
    out.posterior.c0 = branch == 0 ? phase : 0.0;
    out.posterior.c1 = branch == 1 ? phase : 0.0;
    return out;
}

// Partial projection onto an oscillator position record y'. The beam branch
// weights follow from the ratio form; the entanglement is broken and the
// posterior is a pure beam superposition.
inline MeasurementOutcome measure_oscillator_position(const FinalStateAmplitudes& s,
                                                      double y_prime, const ModelParams& p) {
    if (!std::isfinite(y_prime)) throw config_error("measured position must be finite");
    const double r = detail::branch_weight_ratio(s, y_prime, p);
    double w1; // scattered-branch posterior weight
    if (std::isinf(r)) {
        w1 = 1.0;
    } else {
        w1 = r / (1.0 + r);
    }
    const double w0 = 1.0 / (1.0 + r); // 0 when r is infinite, as required

    MeasurementOutcome out;
    out.observable = Observable::oscillator_position;
    out.value = y_prime;
    out.probability = w1;
    out.posterior.k0 = s.k0;
    out.posterior.k1 = s.k1;
    out.posterior.e_total = s.e_total;
    const auto phase = [](std::complex<double> c) {
        const double m = std::abs(c);
        return m > 0.0 ? c / m : std::complex<double>{1.0, 0.0};
    };
    const double sign1 = y_prime < 0.0 ? -1.0 : 1.0; // excited eigenstate is odd
    out.posterior.c0 = phase(s.c0) * std::sqrt(w0);
    out.posterior.c1 = phase(s.c1) * sign1 * std::sqrt(w1);
    return out;
}

// Position where the two posterior branch weights cross, P(k1|y*) = 1/2:
// y* = sigma * |c0/c1| / sqrt(2).
inline double crossover_position(const FinalStateAmplitudes& s, const ModelParams& p) {
    if (std::abs(s.c1) == 0.0) {
        throw numeric_error("scattered branch is empty; posterior weights never cross");
    }
    return p.oscillator_length() * std::abs(s.c0) / std::abs(s.c1) / std::numbers::sqrt2;
}

// Closed-form branch densities |c0 psi_ground(y)|^2 and |c1 psi_excited(y)|^2.
inline std::pair<double, double> branch_densities(const FinalStateAmplitudes& s, double y,
                                                  const ModelParams& p) {
    const double sigma = p.oscillator_length();
    const double gauss2 = std::exp(-y * y / (sigma * sigma)) /
                          (std::sqrt(std::numbers::pi) * sigma);
    const double u = y / sigma;
    return {std::norm(s.c0) * gauss2, std::norm(s.c1) * 2.0 * u * u * gauss2};
}

struct JointSample {
    int branch = 0; // 0 = unscattered (k0), 1 = scattered (k1)
    double y = 0.0;
};

struct JointSampleResult {
    std::vector<JointSample> samples;
    std::size_t count_k0 = 0;
    std::size_t count_k1 = 0;
};

namespace detail {

// Inverse-CDF sampler over a tabulated density on a uniform grid.
class TabulatedSampler {
public:
    TabulatedSampler(std::vector<double> y, const std::vector<double>& density) : y_(std::move(y)) {
        cdf_.resize(y_.size(), 0.0);
        for (std::size_t i = 1; i < y_.size(); ++i) {
            cdf_[i] = cdf_[i - 1] + 0.5 * (y_[i] - y_[i - 1]) * (density[i] + density[i - 1]);
        }
        const double total = cdf_.back();
        if (!(total > 0.0)) throw numeric_error("sampling density integrates to zero");
        for (auto& c : cdf_) c /= total;
    }

    double sample(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t i = std::min<std::size_t>(
            std::max<std::ptrdiff_t>(it - cdf_.begin(), 1), cdf_.size() - 1);
        const double span = cdf_[i] - cdf_[i - 1];
        const double w = span > 0.0 ? (u - cdf_[i - 1]) / span : 0.0;
        return y_[i - 1] + w * (y_[i] - y_[i - 1]);
    }

private:
    std::vector<double> y_;
    std::vector<double> cdf_;
};

// mt19937_64 mapped to [0, 1) with a fixed 53-bit construction, so sampled
// outputs are reproducible across platforms and standard libraries.
inline double next_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace detail

// Draws n joint (beam branch, oscillator position) measurement records with
// the chosen measurement order. Both orders realize the same joint law; the
// order only changes which marginal is drawn first.
inline JointSampleResult sample_joint_measurement(const FinalStateAmplitudes& s,
                                                  std::uint64_t seed, MeasurementOrder order,
                                                  std::size_t n, const ModelParams& p) {
    if (n < 1) throw config_error("sample count must be at least 1");
    const double w0 = std::norm(s.c0);
    const double w1 = std::norm(s.c1);
    if (std::abs(w0 + w1 - 1.0) > 1e-9) {
        throw config_error("final state amplitudes are not normalized");
    }

    const double sigma = p.oscillator_length();
    constexpr int table_points = 4097;
    std::vector<double> grid(table_points), d0(table_points), d1(table_points),
        mix(table_points);
    for (int i = 0; i < table_points; ++i) {
        const double y = (-10.0 + 20.0 * i / (table_points - 1)) * sigma;
        grid[static_cast<std::size_t>(i)] = y;
        const auto [b0, b1] = branch_densities(s, y, p);
        d0[static_cast<std::size_t>(i)] = w0 > 0.0 ? b0 / w0 : 0.0;
        d1[static_cast<std::size_t>(i)] = w1 > 0.0 ? b1 / w1 : 0.0;
        mix[static_cast<std::size_t>(i)] = b0 + b1;
    }

    std::mt19937_64 eng(seed);
    JointSampleResult out;
    out.samples.reserve(n);

    if (order == MeasurementOrder::beam_first) {
        // A branch with zero weight is never drawn, so skip its sampler.
        std::optional<detail::TabulatedSampler> sampler0, sampler1;
        if (w0 > 0.0) sampler0.emplace(grid, d0);
        if (w1 > 0.0) sampler1.emplace(grid, d1);
        for (std::size_t i = 0; i < n; ++i) {
            const int branch = detail::next_uniform(eng) < w1 ? 1 : 0;
            const double y = (branch == 1 ? *sampler1 : *sampler0).sample(detail::next_uniform(eng));
            out.samples.push_back({branch, y});
        }
    } else {
        const detail::TabulatedSampler mixture(grid, mix);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = mixture.sample(detail::next_uniform(eng));
            const double r = detail::branch_weight_ratio(s, y, p);
            const double p_scattered = std::isinf(r) ? 1.0 : r / (1.0 + r);
            const int branch = detail::next_uniform(eng) < p_scattered ? 1 : 0;
            out.samples.push_back({branch, y});
        }
    }
    for (const auto& sample : out.samples) {
        if (sample.branch == 1) {
            ++out.count_k1;
        } else {
            ++out.count_k0;
        }
    }
    return out;
}

} // namespace beamosc
