#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bhp::quad {

// Adaptive Gauss-Kronrod (G7-K15) on [a, b].
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-11) {
    if (!(a <= b)) throw std::invalid_argument("integrate: a > b");
    if (a == b) return 0.0;
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 10, tol, &err);
    return v;
}

// Single non-adaptive K15 panel; exact to roundoff for smooth integrands on
// short intervals (table cells).
template <class F>
double panel(const F& f, double a, double b) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0);
}

// Integral on [a, b] split at the given breakpoints (integrand may have
// kinks or jumps there).
template <class F>
double integrate_segmented(const F& f, double a, double b,
                           const std::vector<double>& breakpoints,
                           double tol = 1e-12) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breakpoints)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(f, cuts[i], cuts[i + 1], tol);
    return total;
}

}  // namespace bhp::quad
