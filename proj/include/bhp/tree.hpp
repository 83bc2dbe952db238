#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhp/offspring.hpp"
#include "bhp/rates.hpp"
#include "bhp/rng.hpp"

namespace bhp {

// one draw from the lifetime density f_B, by hazard inversion
inline double sample_lifetime(const RateFunction& rate, Rng& rng) {
    return rate.inverse_cumulative_hazard(rng.exponential());
}

class PopulationCapError : public std::runtime_error {
  public:
    explicit PopulationCapError(const std::string& what) : std::runtime_error(what) {}
};

// Flat arena of a simulated tree up to the horizon. Children sit behind
// their parent (frontier order), so a single index pass reproduces the
// generation order; no child pointers are stored.
struct PopulationTree {
    double horizon = 0.0;
    std::vector<double> birth;
    std::vector<double> lifetime;
    std::vector<std::int32_t> parent;     // -1 for the root
    std::vector<std::int32_t> offspring;  // 0 for censored nodes (not observed)
    std::size_t interior_count = 0;       // died before the horizon
    std::size_t boundary_count = 0;       // alive at the horizon

    std::size_t size() const { return birth.size(); }
    double death(std::size_t i) const { return birth[i] + lifetime[i]; }
    bool censored(std::size_t i) const { return death(i) > horizon; }
};

struct SimLimits {
    std::size_t max_nodes = 10'000'000;
    double lambda_hint = -1.0;  // growth rate for the cap diagnostic, if known
};

PopulationTree simulate_tree(const RateFunction& rate, const OffspringLaw& law, double horizon,
                             Rng& rng, const SimLimits& limits = {});

// The statistician's view: uncensored lifetimes with offspring counts for
// the interior, censored ages T - b_u for the boundary.
struct ObservedSample {
    double horizon = 0.0;
    std::vector<double> interior_ages;
    std::vector<int> interior_offspring;
    std::vector<double> boundary_ages;
};

ObservedSample extract_sample(const PopulationTree& tree);

// columns: node_id,parent_id,birth,lifetime,death,nu,censored
void write_tree_csv(const PopulationTree& tree, std::ostream& out);
PopulationTree read_tree_csv(std::istream& in, double horizon);

}  // namespace bhp
