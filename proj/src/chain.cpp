#include "bhp/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace bhp {

ChainState simulate_chain(const AgeHazard& hazard, double x0, double t_end, Rng& rng) {
    if (x0 < 0.0 || t_end < 0.0) throw std::invalid_argument("simulate_chain: negative input");
    ChainState s;
    s.age = x0;
    double t = 0.0;
    while (true) {
        double wait = hazard.invert_cumhaz(hazard.cumhaz(s.age) + rng.exponential()) - s.age;
        if (t + wait > t_end) {
            s.age += t_end - t;
            return s;
        }
        t += wait;
        s.age = 0.0;
        ++s.jumps;
    }
}

void chain_ages_on_grid(const AgeHazard& hazard, double x0, std::span<const double> grid,
                        Rng& rng, std::span<double> out) {
    if (grid.empty()) return;
    double t = 0.0, age = x0;
    std::size_t k = 0;
    while (k < grid.size()) {
        double wait = hazard.invert_cumhaz(hazard.cumhaz(age) + rng.exponential()) - age;
        while (k < grid.size() && grid[k] < t + wait) {
            out[k] = age + (grid[k] - t);
            ++k;
        }
        t += wait;
        age = 0.0;
    }
}

McEstimate semigroup_mc(const AgeHazard& hazard, const std::function<double(double)>& g,
                        double x0, double t, std::size_t n_paths, Rng& rng) {
    if (n_paths < 2) throw std::invalid_argument("semigroup_mc: need at least two paths");
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        double v = g(simulate_chain(hazard, x0, t, rng).age);
        acc += v;
        acc2 += v * v;
    }
    double n = static_cast<double>(n_paths);
    McEstimate e;
    e.value = acc / n;
    double var = std::max(0.0, (acc2 - acc * acc / n) / (n - 1.0));
    e.se = std::sqrt(var / n);
    return e;
}

bool CouplingReport::within_bound(double z) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (frequency[i] > bound[i] + z * se[i]) return false;
    return true;
}

CouplingReport coupling_tv(const AgeHazard& hazard, double x0, std::span<const double> t_grid,
                           std::size_t n_pairs, Rng& rng,
                           const std::function<double(Rng&)>& initial) {
    if (t_grid.empty()) throw std::invalid_argument("coupling_tv: empty grid");
    double t_max = t_grid.back();
    double hbar = hazard.sup_rate() * (1.0 + 1e-6);
    double rho = hazard.inf_rate();

    std::vector<std::size_t> not_coupled(t_grid.size(), 0);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        double ay = x0, az = initial(rng);
        double t = 0.0;
        double tau = std::numeric_limits<double>::infinity();
        while (t < t_max) {
            double dt = rng.exponential(hbar);
            t += dt;
            if (t >= t_max) break;
            ay += dt;
            az += dt;
            double level = rng.uniform() * hbar;
            bool jy = level <= hazard.rate(ay);
            bool jz = level <= hazard.rate(az);
            if (jy) ay = 0.0;
            if (jz) az = 0.0;
            if (jy && jz) {
                tau = t;
                break;
            }
        }
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            if (tau > t_grid[k]) ++not_coupled[k];
    }

    CouplingReport rep;
    double n = static_cast<double>(n_pairs);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        double f = static_cast<double>(not_coupled[k]) / n;
        rep.times.push_back(t_grid[k]);
        rep.frequency.push_back(f);
        rep.se.push_back(std::sqrt(f * (1.0 - f) / n));
        rep.bound.push_back(std::exp(-rho * t_grid[k]));
    }
    return rep;
}

}  // namespace bhp
