#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bhp/kernel.hpp"
#include "bhp/tree.hpp"

namespace bhp {

// plain empirical measure |V|^{-1} sum g(age)
double empirical_measure(std::span<const double> ages, const std::function<double(double)>& g);

// mean observed offspring count; 2 when no division was observed
double estimate_m(const ObservedSample& sample);

// (interior mean/(m_hat - 1) + boundary mean)^{-1}; an empty interior
// contributes 0 (callers flag that case)
double estimate_lambda(const ObservedSample& sample, double m_hat);

// h = exp(-lambda_hat T/(2 beta + 1))
double bandwidth_theoretical(double lambda_hat, double beta, double T);

// 1.06 sigma_hat n^{-1/5}
double bandwidth_rule_of_thumb(std::span<const double> interior_ages);

enum GuardFlag : std::uint8_t {
    kGuardNone = 0,
    kGuardDenomZeroed = 1,   // denominator <= 0: value forced to 0
    kGuardDenomClipped = 2,  // denominator clipped at the floor
    kGuardNegativeValue = 4  // negative ratio clipped to 0
};

struct EstimationResult {
    double m_hat = 0.0;
    double lambda_hat = 0.0;
    double bandwidth = 0.0;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<std::uint8_t> guard_flags;
    bool weight_truncated = false;     // lifetime exponent capped at 2T
    bool degenerate_interior = false;  // lambda_hat from boundary data only
    std::uint64_t seed = 0;            // provenance
    std::string config_id;
};

// De-biased kernel estimate of the division rate on the grid; weights
// m_hat^{-1} e^{lambda_hat zeta} undo the selection bias, the indicator
// prefix sum supplies the survival denominator.
EstimationResult estimate_division_rate(const ObservedSample& sample, double m_hat,
                                        double lambda_hat, const Kernel& kernel, double h,
                                        std::span<const double> grid);

// Boundary-only derivative-kernel estimate; converges to the density of the
// rate B + lambda (the ill-posed route).
std::vector<double> estimate_boundary_density(const ObservedSample& sample, double m_hat,
                                              double lambda_hat, const Kernel& kernel, double h,
                                              std::span<const double> grid);

// discrete L2 relative error against the true rate over the grid
double relative_error(std::span<const double> estimate,
                      const std::function<double(double)>& truth, std::span<const double> grid);

std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace bhp
