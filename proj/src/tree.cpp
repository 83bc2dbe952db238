#include "bhp/tree.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace bhp {

PopulationTree simulate_tree(const RateFunction& rate, const OffspringLaw& law, double horizon,
                             Rng& rng, const SimLimits& limits) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_tree: horizon must be positive");
    PopulationTree tree;
    tree.horizon = horizon;
    tree.birth.reserve(1024);
    tree.lifetime.reserve(1024);
    tree.parent.reserve(1024);
    tree.offspring.reserve(1024);

    tree.birth.push_back(0.0);
    tree.lifetime.push_back(sample_lifetime(rate, rng));
    tree.parent.push_back(-1);
    tree.offspring.push_back(0);

    for (std::size_t i = 0; i < tree.size(); ++i) {
        double d = tree.birth[i] + tree.lifetime[i];
        if (d <= horizon) {
            ++tree.interior_count;
            int nu = law.sample(rng);
            tree.offspring[i] = nu;
            if (tree.size() + static_cast<std::size_t>(nu) > limits.max_nodes) {
                std::string msg = "population cap exceeded (cap=" +
                                  std::to_string(limits.max_nodes) +
                                  ", T=" + std::to_string(horizon);
                if (limits.lambda_hint > 0.0)
                    msg += ", lambda_B=" + std::to_string(limits.lambda_hint);
                throw PopulationCapError(msg + ")");
            }
            for (int k = 0; k < nu; ++k) {
                tree.birth.push_back(d);
                tree.lifetime.push_back(sample_lifetime(rate, rng));
                tree.parent.push_back(static_cast<std::int32_t>(i));
                tree.offspring.push_back(0);
            }
        } else {
            ++tree.boundary_count;
        }
    }
    return tree;
}

ObservedSample extract_sample(const PopulationTree& tree) {
    ObservedSample s;
    s.horizon = tree.horizon;
    s.interior_ages.reserve(tree.interior_count);
    s.interior_offspring.reserve(tree.interior_count);
    s.boundary_ages.reserve(tree.boundary_count);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (tree.censored(i)) {
            s.boundary_ages.push_back(tree.horizon - tree.birth[i]);
        } else {
            s.interior_ages.push_back(tree.lifetime[i]);
            s.interior_offspring.push_back(tree.offspring[i]);
        }
    }
    return s;
}

void write_tree_csv(const PopulationTree& tree, std::ostream& out) {
    out << "node_id,parent_id,birth,lifetime,death,nu,censored\n";
    char buf[160];
    for (std::size_t i = 0; i < tree.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g,%.17g,%.17g,%d,%d\n", i, tree.parent[i],
                      tree.birth[i], tree.lifetime[i], tree.death(i), tree.offspring[i],
                      tree.censored(i) ? 1 : 0);
        out << buf;
    }
}

PopulationTree read_tree_csv(std::istream& in, double horizon) {
    PopulationTree tree;
    tree.horizon = horizon;
    std::string line;
    if (!std::getline(in, line) || line.rfind("node_id,", 0) != 0)
        throw std::runtime_error("read_tree_csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t id;
        int parent, nu, censored;
        double birth, lifetime, death;
        if (std::sscanf(line.c_str(), "%zu,%d,%lg,%lg,%lg,%d,%d", &id, &parent, &birth, &lifetime,
                        &death, &nu, &censored) != 7)
            throw std::runtime_error("read_tree_csv: malformed row: " + line);
        if (id != tree.size()) throw std::runtime_error("read_tree_csv: rows out of order");
        tree.birth.push_back(birth);
        tree.lifetime.push_back(lifetime);
        tree.parent.push_back(parent);
        tree.offspring.push_back(nu);
        if (birth + lifetime > horizon)
            ++tree.boundary_count;
        else
            ++tree.interior_count;
    }
    if (tree.size() == 0) throw std::runtime_error("read_tree_csv: empty tree");
    return tree;
}

}  // namespace bhp
