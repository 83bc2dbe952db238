#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "bhp/quad.hpp"

namespace bhp {

// Smoothing kernel with `order` vanishing moments (int x^k K = 0 for
// 1 <= k <= order, int K = 1).
struct Kernel {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double support_radius = 1.0;
    int order = 1;
};

inline Kernel gaussian_kernel() {
    Kernel k;
    k.name = "gaussian";
    k.value = [](double x) { return 0.3989422804014327 * std::exp(-0.5 * x * x); };
    k.deriv = [](double x) { return -x * 0.3989422804014327 * std::exp(-0.5 * x * x); };
    k.support_radius = 8.5;  // mass beyond is ~1e-17
    k.order = 1;
    return k;
}

inline Kernel epanechnikov_kernel() {
    Kernel k;
    k.name = "epanechnikov";
    k.value = [](double x) { return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0; };
    k.deriv = [](double x) { return std::abs(x) <= 1.0 ? -1.5 * x : 0.0; };
    k.support_radius = 1.0;
    k.order = 1;
    return k;
}

// polynomial kernel with three vanishing moments (order n_0 = 3)
inline Kernel quartic_order3_kernel() {
    Kernel k;
    k.name = "quartic-o3";
    k.value = [](double x) {
        if (std::abs(x) > 1.0) return 0.0;
        double x2 = x * x;
        return 15.0 / 32.0 * (3.0 - 10.0 * x2 + 7.0 * x2 * x2);
    };
    k.deriv = [](double x) {
        if (std::abs(x) > 1.0) return 0.0;
        return 15.0 / 32.0 * (-20.0 * x + 28.0 * x * x * x);
    };
    k.support_radius = 1.0;
    k.order = 3;
    return k;
}

inline Kernel kernel_by_name(const std::string& name) {
    if (name == "gaussian") return gaussian_kernel();
    if (name == "epanechnikov") return epanechnikov_kernel();
    if (name == "quartic-o3") return quartic_order3_kernel();
    throw std::invalid_argument("unknown kernel: " + name);
}

inline double kernel_moment(const Kernel& k, int power) {
    double r = k.support_radius;
    return quad::integrate(
        [&](double x) { return std::pow(x, power) * k.value(x); }, -r, r, 1e-12);
}

}  // namespace bhp
