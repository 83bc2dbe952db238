#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bhp/hazard.hpp"
#include "bhp/rng.hpp"

namespace bhp {

struct ChainState {
    double age = 0.0;
    std::uint64_t jumps = 0;
};

// Age chain with generator g'(x) + H(x)(g(0) - g(x)): age grows with slope 1,
// resets to 0 at hazard H. Holding times are drawn by exact inversion of the
// conditional survival exp(-(LambdaH(x+s) - LambdaH(x))).
ChainState simulate_chain(const AgeHazard& hazard, double x0, double t_end, Rng& rng);

// ages of one path observed at the given (sorted, nonnegative) grid times
void chain_ages_on_grid(const AgeHazard& hazard, double x0, std::span<const double> grid,
                        Rng& rng, std::span<double> out);

struct McEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Monte-Carlo estimate of P^t_H g(x0)
McEstimate semigroup_mc(const AgeHazard& hazard, const std::function<double(double)>& g,
                        double x0, double t, std::size_t n_paths, Rng& rng);

struct CouplingReport {
    std::vector<double> times;
    std::vector<double> frequency;  // empirical P(Y_t != Z_t)
    std::vector<double> se;
    std::vector<double> bound;      // exp(-rho t)
    bool within_bound(double z = 3.0) const;
};

// Couples a path started at x0 with one started from `initial` through a
// shared dominating Poisson stream; a proposal accepted by both chains makes
// them coincide forever, which happens at rate >= inf H.
CouplingReport coupling_tv(const AgeHazard& hazard, double x0, std::span<const double> t_grid,
                           std::size_t n_pairs, Rng& rng,
                           const std::function<double(Rng&)>& initial);

}  // namespace bhp
