#include "bhp/mto.hpp"

#include <cmath>

#include "bhp/chain.hpp"

namespace bhp {

namespace {

double trapz(std::span<const double> grid, std::span<const double> f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        acc += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
    return acc;
}

// cumulative trapezoid of e^{lambda t} f(t); out[j] = int_0^{grid[j]}
void cum_exp_trapz(std::span<const double> grid, std::span<const double> f, double lambda,
                   std::vector<double>& out) {
    out.assign(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double a = std::exp(lambda * grid[i - 1]) * f[i - 1];
        double b = std::exp(lambda * grid[i]) * f[i];
        out[i] = out[i - 1] + 0.5 * (a + b) * (grid[i] - grid[i - 1]);
    }
}

struct TreeSideStats {
    double mean = 0.0, se = 0.0;
};

// mean and se over trees of a per-tree node statistic
template <class PerTree>
TreeSideStats tree_side(const MalthusData& md, double T, const MtoOptions& opt,
                        std::uint64_t salt, PerTree&& per_tree) {
    double acc = 0.0, acc2 = 0.0;
    SimLimits limits;
    limits.max_nodes = opt.max_nodes;
    limits.lambda_hint = md.lambda();
    for (std::size_t i = 0; i < opt.n_trees; ++i) {
        Rng rng = Rng::stream(opt.seed ^ salt, i);
        PopulationTree tree = simulate_tree(md.rate(), md.law(), T, rng, limits);
        double v = per_tree(tree);
        acc += v;
        acc2 += v * v;
    }
    double n = static_cast<double>(opt.n_trees);
    TreeSideStats s;
    s.mean = acc / n;
    s.se = std::sqrt(std::max(0.0, (acc2 - acc * acc / n) / (n - 1.0)) / n);
    return s;
}

struct ParticleSideStats {
    double mean = 0.0, se = 0.0;
};

// batch means of a functional of the semigroup estimates; nonlinear
// combiners get their small plug-in bias washed out by the batch size
template <class Combine>
ParticleSideStats particle_side(const MalthusData& md, double T, const MtoOptions& opt,
                                std::uint64_t salt, const std::vector<const TestFn*>& node_fns,
                                Combine&& combine) {
    MalthusData::BiasedHazard hazard = md.biased_hazard();
    std::size_t n_nodes = opt.time_nodes + 1;
    std::vector<double> grid(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j)
        grid[j] = T * static_cast<double>(j) / static_cast<double>(opt.time_nodes);

    std::size_t k_batches = std::max<std::size_t>(2, opt.n_batches);
    std::size_t per_batch = std::max<std::size_t>(1, opt.n_paths / k_batches);
    std::vector<double> batch_values;
    batch_values.reserve(k_batches);

    std::vector<double> ages(n_nodes);
    std::size_t n_fns = node_fns.size();
    std::vector<std::vector<double>> sums(n_fns, std::vector<double>(n_nodes));

    for (std::size_t b = 0; b < k_batches; ++b) {
        for (auto& s : sums) std::fill(s.begin(), s.end(), 0.0);
        Rng rng = Rng::stream(opt.seed ^ salt ^ 0x9e3779b9ULL, b);
        for (std::size_t p = 0; p < per_batch; ++p) {
            chain_ages_on_grid(hazard, 0.0, grid, rng, ages);
            for (std::size_t f = 0; f < n_fns; ++f) {
                const TestFn& fn = *node_fns[f];
                for (std::size_t j = 0; j < n_nodes; ++j) sums[f][j] += fn(ages[j]);
            }
        }
        for (auto& s : sums)
            for (double& v : s) v /= static_cast<double>(per_batch);
        batch_values.push_back(combine(grid, sums));
    }

    double acc = 0.0, acc2 = 0.0;
    for (double v : batch_values) acc += v, acc2 += v * v;
    double k = static_cast<double>(batch_values.size());
    ParticleSideStats s;
    s.mean = acc / k;
    s.se = std::sqrt(std::max(0.0, (acc2 - acc * acc / k) / (k - 1.0)) / k);
    return s;
}

MtoReport assemble(std::string identity, double T, const MtoOptions& opt, TreeSideStats lhs,
                   ParticleSideStats rhs) {
    MtoReport r;
    r.identity = std::move(identity);
    r.horizon = T;
    r.n_trees = opt.n_trees;
    r.n_paths = opt.n_paths;
    r.lhs = lhs.mean;
    r.lhs_se = lhs.se;
    r.rhs = rhs.mean;
    r.rhs_se = rhs.se;
    double denom = std::sqrt(lhs.se * lhs.se + rhs.se * rhs.se);
    r.z = denom > 0.0 ? (lhs.mean - rhs.mean) / denom : 0.0;
    return r;
}

// per-tree sums used by the pair identities
struct PairSums {
    double s = 0.0;   // sum of g over interior nodes
    double q = 0.0;   // sum of g^2 over interior nodes
    double l = 0.0;   // sum over ordered lineage pairs u < v (strict ancestor)
};

PairSums pair_sums(const PopulationTree& tree, const TestFn& g) {
    PairSums ps;
    // anc[i]: sum of g over interior strict ancestors of i (all ancestors of
    // a materialized node are interior by construction)
    std::vector<double> anc(tree.size(), 0.0);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (i > 0) {
            std::size_t p = static_cast<std::size_t>(tree.parent[i]);
            anc[i] = anc[p] + g(tree.lifetime[p]);
        }
        if (!tree.censored(i)) {
            double v = g(tree.lifetime[i]);
            ps.s += v;
            ps.q += v * v;
            ps.l += v * anc[i];
        }
    }
    return ps;
}

}  // namespace

namespace mto_detail {

double interior_rhs(std::span<const double> grid, std::span<const double> p_gh, double lambda,
                    double m) {
    std::vector<double> w(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) w[j] = std::exp(lambda * grid[j]) * p_gh[j];
    return trapz(grid, w) / m;
}

double forks_rhs(std::span<const double> grid, std::span<const double> p_gh,
                 std::span<const double> p_h, double lambda, double mbar, double m) {
    std::vector<double> c;
    cum_exp_trapz(grid, p_gh, lambda, c);
    std::size_t n = grid.size();
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        double inner = c[n - 1 - j];  // int_0^{T-s_j}
        w[j] = std::exp(lambda * grid[j]) * inner * inner * p_h[j];
    }
    return mbar / (m * m * m) * trapz(grid, w);
}

double lineage_rhs(std::span<const double> grid, std::span<const double> p_gh, double lambda,
                   double m) {
    // conditioning on the ancestor and applying the one-node identity twice
    // yields the prefactor 1/m (factor m from the children count times 1/m^2
    // from the two applications)
    std::vector<double> c;
    cum_exp_trapz(grid, p_gh, lambda, c);
    std::size_t n = grid.size();
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j)
        w[j] = std::exp(lambda * grid[j]) * c[n - 1 - j] * p_gh[j];
    return trapz(grid, w) / m;
}

double pairs_alive_rhs(std::span<const double> grid, std::span<const double> p_ghb,
                       std::span<const double> p_h, double lambda, double mbar, double m) {
    std::size_t n = grid.size();
    double T = grid.back();
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        double rev = std::exp(lambda * (T - grid[j])) * p_ghb[n - 1 - j];
        w[j] = std::exp(lambda * grid[j]) * rev * rev * p_h[j];
    }
    return mbar / (m * m * m) * trapz(grid, w);
}

}  // namespace mto_detail

MtoReport verify_mto_boundary(const MalthusData& md, const TestFn& g, double T,
                              const MtoOptions& opt) {
    TreeSideStats lhs = tree_side(md, T, opt, 0xb0d1ULL, [&](const PopulationTree& tree) {
        double acc = 0.0;
        for (std::size_t i = 0; i < tree.size(); ++i)
            if (tree.censored(i)) acc += g(T - tree.birth[i]);
        return acc;
    });
    double lambda = md.lambda(), m = md.mean_offspring();
    TestFn ghb = [&](double x) { return g(x) * md.biased_rate(x) / md.rate()(x); };
    ParticleSideStats rhs = particle_side(
        md, T, opt, 0xb0d2ULL, {&ghb},
        [&](std::span<const double> grid, const std::vector<std::vector<double>>& sums) {
            (void)grid;
            return std::exp(lambda * T) / m * sums[0].back();
        });
    return assemble("boundary", T, opt, lhs, rhs);
}

MtoReport verify_mto_interior(const MalthusData& md, const TestFn& g, double T,
                              const MtoOptions& opt) {
    TreeSideStats lhs = tree_side(md, T, opt, 0x11a1ULL, [&](const PopulationTree& tree) {
        double acc = 0.0;
        for (std::size_t i = 0; i < tree.size(); ++i)
            if (!tree.censored(i)) acc += g(tree.lifetime[i]);
        return acc;
    });
    double lambda = md.lambda(), m = md.mean_offspring();
    TestFn gh = [&](double x) { return g(x) * md.biased_rate(x); };
    ParticleSideStats rhs = particle_side(
        md, T, opt, 0x11a2ULL, {&gh},
        [&](std::span<const double> grid, const std::vector<std::vector<double>>& sums) {
            return mto_detail::interior_rhs(grid, sums[0], lambda, m);
        });
    return assemble("interior", T, opt, lhs, rhs);
}

MtoReport verify_mto_forks(const MalthusData& md, const TestFn& g, double T,
                           const MtoOptions& opt) {
    TreeSideStats lhs = tree_side(md, T, opt, 0xf0c5ULL, [&](const PopulationTree& tree) {
        PairSums ps = pair_sums(tree, g);
        return ps.s * ps.s - ps.q - 2.0 * ps.l;
    });
    double lambda = md.lambda(), m = md.mean_offspring();
    double mbar = md.law().pair_constant();
    TestFn gh = [&](double x) { return g(x) * md.biased_rate(x); };
    TestFn h = [&](double x) { return md.biased_rate(x); };
    ParticleSideStats rhs = particle_side(
        md, T, opt, 0xf0c6ULL, {&gh, &h},
        [&](std::span<const double> grid, const std::vector<std::vector<double>>& sums) {
            return mto_detail::forks_rhs(grid, sums[0], sums[1], lambda, mbar, m);
        });
    return assemble("forks", T, opt, lhs, rhs);
}

MtoReport verify_mto_lineage(const MalthusData& md, const TestFn& g, double T,
                             const MtoOptions& opt) {
    TreeSideStats lhs = tree_side(md, T, opt, 0x11e4ULL, [&](const PopulationTree& tree) {
        return pair_sums(tree, g).l;
    });
    double lambda = md.lambda(), m = md.mean_offspring();
    TestFn gh = [&](double x) { return g(x) * md.biased_rate(x); };
    ParticleSideStats rhs = particle_side(
        md, T, opt, 0x11e5ULL, {&gh},
        [&](std::span<const double> grid, const std::vector<std::vector<double>>& sums) {
            return mto_detail::lineage_rhs(grid, sums[0], lambda, m);
        });
    return assemble("lineage", T, opt, lhs, rhs);
}

MtoReport verify_mto_pairs_alive(const MalthusData& md, const TestFn& g, double T,
                                 const MtoOptions& opt) {
    TreeSideStats lhs = tree_side(md, T, opt, 0xa11eULL, [&](const PopulationTree& tree) {
        double s = 0.0, q = 0.0;
        for (std::size_t i = 0; i < tree.size(); ++i)
            if (tree.censored(i)) {
                double v = g(T - tree.birth[i]);
                s += v;
                q += v * v;
            }
        return s * s - q;
    });
    double lambda = md.lambda(), m = md.mean_offspring();
    double mbar = md.law().pair_constant();
    TestFn ghb = [&](double x) { return g(x) * md.biased_rate(x) / md.rate()(x); };
    TestFn h = [&](double x) { return md.biased_rate(x); };
    ParticleSideStats rhs = particle_side(
        md, T, opt, 0xa11fULL, {&ghb, &h},
        [&](std::span<const double> grid, const std::vector<std::vector<double>>& sums) {
            return mto_detail::pairs_alive_rhs(grid, sums[0], sums[1], lambda, mbar, m);
        });
    return assemble("pairs-alive", T, opt, lhs, rhs);
}

}  // namespace bhp
