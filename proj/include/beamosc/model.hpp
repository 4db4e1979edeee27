#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "beamosc/errors.hpp"
#include "beamosc/quadrature.hpp"

namespace beamosc {

// Physical constants of the model: a free beam particle (mass m, speed v)
// coupled to a harmonic oscillator (reduced mass mu, frequency omega0) through
// the interaction H1 = -alpha * y * f(x), where f is a spatial window.
struct ModelParams {
    double hbar = 1.0;
    double m = 1.0;
    double mu = 100.0;
    double omega0 = 1.0;
    double alpha = 1.0;
    double v = 7.0;

    // Oscillator ground-state length scale sqrt(hbar / (mu * omega0)).
    double oscillator_length() const { return std::sqrt(hbar / (mu * omega0)); }

    // Beam wavenumber m * v / hbar associated with the configured speed.
    double beam_wavenumber() const { return m * v / hbar; }

    void validate() const {
        auto positive = [](double value, const char* name) {
            if (!(value > 0.0) || !std::isfinite(value)) {
                throw config_error(std::string(name) + " must be positive and finite");
            }
        };
        positive(hbar, "hbar");
        positive(m, "m");
        positive(mu, "mu");
        positive(omega0, "omega0");
        if (!std::isfinite(alpha)) throw config_error("alpha must be finite");
        if (v == 0.0 || !std::isfinite(v)) throw config_error("v must be nonzero and finite");
    }
};

// Spatial coupling profile f(x). The gaussian kind b^-2 * exp(-x^2/b^2) has
// closed-form Fourier transforms; tabulated windows fall back to trapezoid
// quadrature on their stored grid.
class WindowFunction {
public:
    enum class Kind { gaussian, tabulated };

    static WindowFunction gaussian(double b) {
        if (!(b > 0.0) || !std::isfinite(b)) {
            throw config_error("window.b must be positive and finite");
        }
        WindowFunction w;
        w.kind_ = Kind::gaussian;
        w.b_ = b;
        return w;
    }

    static WindowFunction tabulated(std::vector<double> x, std::vector<double> f) {
        if (x.size() != f.size() || x.size() < 2) {
            throw config_error("tabulated window needs matching x/f arrays with at least 2 samples");
        }
        double peak = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(x[i]) || !std::isfinite(f[i])) {
                throw config_error("tabulated window samples must be finite");
            }
            if (i > 0 && !(x[i] > x[i - 1])) {
                throw config_error("tabulated window grid must be strictly increasing");
            }
            peak = std::max(peak, std::abs(f[i]));
        }
        if (peak == 0.0) throw config_error("tabulated window is identically zero");
        if (std::abs(f.front()) > 1e-12 * peak || std::abs(f.back()) > 1e-12 * peak) {
            throw config_error("tabulated window must decay below 1e-12 of its peak at the grid edges");
        }
        WindowFunction w;
        w.kind_ = Kind::tabulated;
        w.x_ = std::move(x);
        w.f_ = std::move(f);
        w.peak_ = peak;
        return w;
    }

    Kind kind() const { return kind_; }
    double b() const { return b_; }

    double eval(double x) const {
        if (kind_ == Kind::gaussian) {
            const double u = x / b_;
            return std::exp(-u * u) / (b_ * b_);
        }
        if (x <= x_.front() || x >= x_.back()) return 0.0;
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
        return (1.0 - w) * f_[i - 1] + w * f_[i];
    }

    double deriv(double x) const {
        if (kind_ == Kind::gaussian) {
            return -2.0 * x / (b_ * b_) * eval(x);
        }
        if (x <= x_.front() || x >= x_.back()) return 0.0;
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        return (f_[i] - f_[i - 1]) / (x_[i] - x_[i - 1]);
    }

    double peak() const {
        return kind_ == Kind::gaussian ? 1.0 / (b_ * b_) : peak_;
    }

    // Half-width beyond which f drops under eps_fraction of its peak. Used to
    // choose integration bounds that keep truncation error negligible.
    double support_halfwidth(double eps_fraction) const {
        if (kind_ == Kind::gaussian) {
            return b_ * std::sqrt(-std::log(eps_fraction));
        }
        return std::max(std::abs(x_.front()), std::abs(x_.back()));
    }

    // Spatial transform (2*pi)^{-1/2} * integral of exp(-i*k*x) * f(x) dx.
    std::complex<double> spatial_ft(double k) const {
        constexpr double inv_sqrt2pi = 0.39894228040143268; // 1/sqrt(2*pi)
        if (kind_ == Kind::gaussian) {
            const double kb = 0.5 * k * b_;
            return {std::exp(-kb * kb) / (std::numbers::sqrt2 * b_), 0.0};
        }
        // Trapezoid on the stored grid, trimmed to where f exceeds 1e-14 of peak.
        std::size_t lo = 0;
        std::size_t hi = x_.size() - 1;
        const double cutoff = 1e-14 * peak_;
        while (lo + 1 < hi && std::abs(f_[lo]) < cutoff && std::abs(f_[lo + 1]) < cutoff) ++lo;
        while (hi > lo + 1 && std::abs(f_[hi]) < cutoff && std::abs(f_[hi - 1]) < cutoff) --hi;
        std::vector<double> xs(x_.begin() + lo, x_.begin() + hi + 1);
        std::vector<std::complex<double>> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            ys[i] = std::polar(f_[lo + i], -k * xs[i]);
        }
        return inv_sqrt2pi * trapezoid(xs, ys);
    }

    // Temporal transform (2*pi)^{-1/2} * integral of exp(i*omega*t) * f(v*t) dt.
    // Computed as spatial_ft(-omega/v) / |v|, which is the exact change of
    // variables x = v*t, so the two transforms agree to the last bit.
    std::complex<double> temporal_ft(double v, double omega) const {
        if (v == 0.0 || !std::isfinite(v)) {
            throw config_error("temporal window transform requires nonzero finite beam speed");
        }
        return spatial_ft(-omega / v) / std::abs(v);
    }

private:
    WindowFunction() = default;

    Kind kind_ = Kind::gaussian;
    double b_ = 1.0;
    double peak_ = 0.0;
    std::vector<double> x_;
    std::vector<double> f_;
};

} // namespace beamosc
