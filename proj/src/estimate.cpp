#include "bhp/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace bhp {

double empirical_measure(std::span<const double> ages, const std::function<double(double)>& g) {
    if (ages.empty()) throw std::invalid_argument("empirical_measure: empty sample");
    double acc = 0.0;
    for (double a : ages) acc += g(a);
    return acc / static_cast<double>(ages.size());
}

double estimate_m(const ObservedSample& sample) {
    if (sample.interior_offspring.empty()) return 2.0;
    double acc = 0.0;
    for (int nu : sample.interior_offspring) acc += nu;
    return acc / static_cast<double>(sample.interior_offspring.size());
}

double estimate_lambda(const ObservedSample& sample, double m_hat) {
    if (m_hat <= 1.0 + 1e-9) throw std::invalid_argument("degenerate offspring estimate");
    if (sample.boundary_ages.empty())
        throw std::invalid_argument("estimate_lambda: empty boundary");
    double interior_mean = 0.0;
    if (!sample.interior_ages.empty())
        interior_mean = empirical_measure(sample.interior_ages, [](double x) { return x; });
    double boundary_mean = empirical_measure(sample.boundary_ages, [](double x) { return x; });
    return 1.0 / (interior_mean / (m_hat - 1.0) + boundary_mean);
}

double bandwidth_theoretical(double lambda_hat, double beta, double T) {
    return std::exp(-lambda_hat * T / (2.0 * beta + 1.0));
}

double bandwidth_rule_of_thumb(std::span<const double> interior_ages) {
    std::size_t n = interior_ages.size();
    if (n < 2) throw std::invalid_argument("bandwidth_rule_of_thumb: degenerate sample");
    double mean = 0.0;
    for (double a : interior_ages) mean += a;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double a : interior_ages) ss += (a - mean) * (a - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw std::invalid_argument("bandwidth_rule_of_thumb: degenerate sample");
    return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

EstimationResult estimate_division_rate(const ObservedSample& sample, double m_hat,
                                        double lambda_hat, const Kernel& kernel, double h,
                                        std::span<const double> grid) {
    if (sample.interior_ages.empty())
        throw std::invalid_argument("estimate_division_rate: empty interior");
    if (!(h > 0.0)) throw std::invalid_argument("estimate_division_rate: bandwidth must be > 0");

    EstimationResult res;
    res.m_hat = m_hat;
    res.lambda_hat = lambda_hat;
    res.bandwidth = h;
    res.grid.assign(grid.begin(), grid.end());
    res.degenerate_interior = sample.interior_offspring.empty();

    const double n = static_cast<double>(sample.interior_ages.size());
    const double exponent_cap = 2.0 * sample.horizon;  // truncates rare huge weights

    std::vector<double> ages(sample.interior_ages.begin(), sample.interior_ages.end());
    std::sort(ages.begin(), ages.end());
    std::vector<double> weights(ages.size());
    std::vector<double> prefix(ages.size() + 1, 0.0);
    for (std::size_t i = 0; i < ages.size(); ++i) {
        double zeta = ages[i];
        if (zeta > exponent_cap) {
            zeta = exponent_cap;
            res.weight_truncated = true;
        }
        weights[i] = std::exp(lambda_hat * zeta) / m_hat;
        prefix[i + 1] = prefix[i] + weights[i];
    }

    const double radius = kernel.support_radius * h;
    res.values.reserve(grid.size());
    res.guard_flags.reserve(grid.size());
    constexpr double kDenomFloor = 1e-3;
    for (double x : grid) {
        auto lo = std::lower_bound(ages.begin(), ages.end(), x - radius);
        auto hi = std::upper_bound(ages.begin(), ages.end(), x + radius);
        double num = 0.0;
        for (auto it = lo; it != hi; ++it)
            num += weights[static_cast<std::size_t>(it - ages.begin())] *
                   kernel.value((x - *it) / h);
        num /= n * h;

        auto leq = std::upper_bound(ages.begin(), ages.end(), x);
        double den = 1.0 - prefix[static_cast<std::size_t>(leq - ages.begin())] / n;

        std::uint8_t flag = kGuardNone;
        double value = 0.0;
        if (den <= 0.0) {
            flag |= kGuardDenomZeroed;  // the excluded set of the estimator
        } else {
            if (den < kDenomFloor) {
                den = kDenomFloor;
                flag |= kGuardDenomClipped;
            }
            value = num / den;
            if (value < 0.0) {
                value = 0.0;
                flag |= kGuardNegativeValue;
            }
        }
        res.values.push_back(value);
        res.guard_flags.push_back(flag);
    }
    return res;
}

std::vector<double> estimate_boundary_density(const ObservedSample& sample, double m_hat,
                                              double lambda_hat, const Kernel& kernel, double h,
                                              std::span<const double> grid) {
    if (sample.boundary_ages.empty())
        throw std::invalid_argument("estimate_boundary_density: empty boundary");
    if (!(h > 0.0)) throw std::invalid_argument("estimate_boundary_density: bandwidth must be > 0");
    std::vector<double> ages(sample.boundary_ages.begin(), sample.boundary_ages.end());
    std::sort(ages.begin(), ages.end());
    const double n = static_cast<double>(ages.size());
    const double c = (m_hat - 1.0) / (lambda_hat * m_hat);
    const double radius = kernel.support_radius * h;

    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) {
        auto lo = std::lower_bound(ages.begin(), ages.end(), x - radius);
        auto hi = std::upper_bound(ages.begin(), ages.end(), x + radius);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) acc += kernel.deriv((x - *it) / h);
        out.push_back(-c * acc / (n * h * h));
    }
    return out;
}

double relative_error(std::span<const double> estimate,
                      const std::function<double(double)>& truth, std::span<const double> grid) {
    if (estimate.size() != grid.size())
        throw std::invalid_argument("relative_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = truth(grid[i]);
        double d = estimate[i] - t;
        num += d * d;
        den += t * t;
    }
    if (den == 0.0) throw std::invalid_argument("relative_error: zero truth norm");
    return std::sqrt(num / den);
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("make_grid: bad range");
    std::vector<double> g;
    std::size_t n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
    g.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

}  // namespace bhp
