#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bhp/malthus.hpp"
#include "bhp/tree.hpp"

namespace bhp {

// Monte-Carlo cross-check of one many-to-one identity: lhs averages node
// sums over independent trees, rhs evaluates the tagged-particle expression
// from chain simulations. The two sides use independent seeds, so the
// z-score is a valid two-sample statistic.
struct MtoReport {
    std::string identity;
    double horizon = 0.0;
    std::size_t n_trees = 0;
    std::size_t n_paths = 0;
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double z = 0.0;
};

struct MtoOptions {
    std::size_t n_trees = 2000;
    std::size_t n_paths = 200000;
    std::size_t time_nodes = 256;  // uniform trapezoid grid for time integrals
    std::size_t n_batches = 20;    // batch resampling for the particle side
    std::size_t max_nodes = 10'000'000;
    std::uint64_t seed = 1;
};

using TestFn = std::function<double(double)>;

MtoReport verify_mto_boundary(const MalthusData& md, const TestFn& g, double T,
                              const MtoOptions& opt = {});
MtoReport verify_mto_interior(const MalthusData& md, const TestFn& g, double T,
                              const MtoOptions& opt = {});
// pairs over forks (neither node an ancestor of the other), interior nodes
MtoReport verify_mto_forks(const MalthusData& md, const TestFn& g, double T,
                           const MtoOptions& opt = {});
// pairs along a lineage (strict ancestor), interior nodes
MtoReport verify_mto_lineage(const MalthusData& md, const TestFn& g, double T,
                             const MtoOptions& opt = {});
// ordered pairs of distinct particles alive at the horizon
MtoReport verify_mto_pairs_alive(const MalthusData& md, const TestFn& g, double T,
                                 const MtoOptions& opt = {});

// Deterministic quadrature combiners mapping semigroup values on a uniform
// grid over [0, T] to the right-hand sides of the identities; exposed for
// oracle tests against constant-rate closed forms.
namespace mto_detail {
double interior_rhs(std::span<const double> grid, std::span<const double> p_gh, double lambda,
                    double m);
double forks_rhs(std::span<const double> grid, std::span<const double> p_gh,
                 std::span<const double> p_h, double lambda, double mbar, double m);
double lineage_rhs(std::span<const double> grid, std::span<const double> p_gh, double lambda,
                   double m);
double pairs_alive_rhs(std::span<const double> grid, std::span<const double> p_ghb,
                       std::span<const double> p_h, double lambda, double mbar, double m);
}  // namespace mto_detail

}  // namespace bhp
