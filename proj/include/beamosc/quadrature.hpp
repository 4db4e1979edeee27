#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "beamosc/errors.hpp"

namespace beamosc {

namespace detail {

template <typename F, typename T>
T adaptive_simpson_step(F&& f, double a, double fa_x, double b, T fa, T fm, T fb,
                        T whole, double abs_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    const T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    if (depth <= 0) {
        throw numeric_error("adaptive quadrature failed to converge on [" +
                            std::to_string(a) + ", " + std::to_string(b) +
                            "]; achieved tolerance " + std::to_string(std::abs(delta) / 15.0));
    }
    if (std::abs(delta) <= 15.0 * abs_tol) {
        return left + right + delta / 15.0; // Richardson correction
    }
    return adaptive_simpson_step(f, a, fa_x, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1) +
           adaptive_simpson_step(f, m, fa_x, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson integration of a real- or complex-valued integrand to an
// absolute tolerance. Suited to the smooth decaying integrands used here.
template <typename F>
auto adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48) {
    using T = decltype(f(a));
    if (a == b) return T{};
    const double m = 0.5 * (a + b);
    const T fa = f(a);
    const T fm = f(m);
    const T fb = f(b);
    const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_step(f, a, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Composite trapezoid over tabulated samples on an arbitrary (sorted) grid.
template <typename T>
T trapezoid(const std::vector<double>& x, const std::vector<T>& y) {
    T acc{};
    for (std::size_t i = 1; i < x.size(); ++i) {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    return acc;
}

// Trapezoid on a uniform grid with spacing dx.
template <typename T>
T trapezoid_uniform(const std::vector<T>& y, double dx) {
    if (y.size() < 2) return T{};
    T acc = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
    return acc * dx;
}

} // namespace beamosc
