#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhp/chain.hpp"
#include "bhp/malthus.hpp"
#include "support.hpp"

using bhp::MalthusData;
using bhp::OffspringLaw;
using bhp::RateFunction;
using bhp::RateHazard;
using bhp::Rng;

TEST_CASE("constant hazard: jump counts are Poisson") {
    RateHazard h(RateFunction::constant(0.8));
    Rng rng(17);
    const double t = 5.0;
    const int n = 100000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += static_cast<double>(bhp::simulate_chain(h, 0.0, t, rng).jumps);
    double mean = acc / n;
    double se = std::sqrt(0.8 * t / n);  // Poisson variance = mean
    CHECK(std::abs(mean - 0.8 * t) < 3.0 * se);
}

TEST_CASE("zero elapsed time") {
    RateHazard h(RateFunction::constant(0.5));
    Rng rng(1);
    bhp::ChainState s = bhp::simulate_chain(h, 1.7, 0.0, rng);
    CHECK(s.age == 1.7);
    CHECK(s.jumps == 0);
}

TEST_CASE("terminal age law converges to the invariant distribution") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    MalthusData::BiasedHazard h = md.biased_hazard();
    double t = 30.0 / md.rho();
    const int n = 20000;
    Rng rng(23);
    std::vector<double> ages(n);
    for (int i = 0; i < n; ++i) ages[i] = bhp::simulate_chain(h, 0.0, t, rng).age;
    double ks = testsupport::ks_statistic(ages, [&](double x) { return md.invariant_cdf(x); });
    CHECK(ks < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("semigroup conservation and stationarity") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    MalthusData::BiasedHazard h = md.biased_hazard();
    Rng rng(31);
    bhp::McEstimate one = bhp::semigroup_mc(h, [](double) { return 1.0; }, 0.3, 2.0, 5000, rng);
    CHECK(one.value == 1.0);
    CHECK(one.se == 0.0);

    // started from mu_B the indicator mass is preserved at any t
    auto ind = [](double x) { return x <= 1.0 ? 1.0 : 0.0; };
    double target = md.invariant_cdf(1.0);
    const int n = 40000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double x0 = md.sample_invariant(rng);
        acc += ind(bhp::simulate_chain(h, x0, 3.0, rng).age);
    }
    double p = acc / n;
    double se = std::sqrt(target * (1 - target) / n);
    CHECK(std::abs(p - target) < 3.0 * se);
}

TEST_CASE("two-sample invariance across horizons") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    MalthusData::BiasedHazard h = md.biased_hazard();
    Rng rng(37);
    const int n = 20000;
    std::vector<double> at2(n), at5(n);
    for (int i = 0; i < n; ++i)
        at2[i] = bhp::simulate_chain(h, md.sample_invariant(rng), 2.0, rng).age;
    for (int i = 0; i < n; ++i)
        at5[i] = bhp::simulate_chain(h, md.sample_invariant(rng), 5.0, rng).age;
    double ks = testsupport::ks_two_sample(at2, at5);
    CHECK(ks < 1.628 * std::sqrt(2.0 / n));  // 1% level
}

TEST_CASE("constant hazard: renewal closed form for the age indicator") {
    // for a Poisson age process from 0, P(age_t > a) = e^{-c a} once t >= a
    const double c = 0.8, a = 1.0;
    RateHazard h(RateFunction::constant(c));
    Rng rng(41);
    auto ind = [&](double x) { return x > a ? 1.0 : 0.0; };
    bhp::McEstimate early = bhp::semigroup_mc(h, ind, 0.0, 0.5, 2000, rng);
    CHECK(early.value == 0.0);

    bhp::McEstimate e = bhp::semigroup_mc(h, ind, 0.0, 3.0, 100000, rng);
    double target = std::exp(-c * a);
    CHECK(std::abs(e.value - target) < 3.0 * e.se);
    CHECK(e.se < 0.005);
}

TEST_CASE("ages on a grid are consistent with the path structure") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    MalthusData::BiasedHazard h = md.biased_hazard();
    std::vector<double> grid;
    for (int i = 0; i <= 64; ++i) grid.push_back(8.0 * i / 64.0);
    std::vector<double> ages(grid.size());
    Rng rng(53);
    for (int rep = 0; rep < 200; ++rep) {
        bhp::chain_ages_on_grid(h, 0.0, grid, rng, ages);
        CHECK(ages[0] == 0.0);
        for (std::size_t k = 1; k < grid.size(); ++k) {
            // age either grew by the grid step or was reset below it
            double dt = grid[k] - grid[k - 1];
            bool grew = std::abs(ages[k] - ages[k - 1] - dt) < 1e-12;
            bool reset = ages[k] < dt;
            CHECK((grew || reset));
        }
    }
}

TEST_CASE("coupling: constant hazard meets the exact rate") {
    const double c = 0.7;
    RateHazard h(RateFunction::constant(c));
    std::vector<double> grid;
    for (int i = 0; i <= 9; ++i) grid.push_back(6.0 / c * i / 9.0);
    Rng rng(61);
    // invariant law of the constant-hazard chain is Exp(c)
    auto exp_start = [c](Rng& r) { return r.exponential(c); };
    bhp::CouplingReport rep = bhp::coupling_tv(h, 0.4, grid, 20000, rng, exp_start);
    CHECK(rep.frequency[0] == 1.0);  // t = 0, distinct starts
    for (std::size_t k = 1; k < rep.times.size(); ++k) {
        CHECK(std::abs(rep.frequency[k] - rep.bound[k]) <= 3.0 * rep.se[k] + 1e-12);
        CHECK(rep.frequency[k] <= rep.frequency[k - 1] + 1e-12);  // absorbing
    }
    CHECK(rep.within_bound());
}

TEST_CASE("coupling bound holds for the trial model") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    MalthusData::BiasedHazard h = md.biased_hazard();
    std::vector<double> grid;
    for (int i = 0; i <= 9; ++i) grid.push_back(6.0 / md.rho() * i / 9.0);
    Rng rng(67);
    auto mu_start = [&md](Rng& r) { return md.sample_invariant(r); };
    bhp::CouplingReport rep = bhp::coupling_tv(h, 0.0, grid, 20000, rng, mu_start);
    CHECK(rep.within_bound());
    for (std::size_t k = 1; k < rep.times.size(); ++k)
        CHECK(rep.frequency[k] <= rep.frequency[k - 1] + 1e-12);
}
