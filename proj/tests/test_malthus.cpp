#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhp/malthus.hpp"
#include "support.hpp"

using bhp::MalthusData;
using bhp::OffspringLaw;
using bhp::RateFunction;
using bhp::RateSegment;

namespace {
const double kTrialLambda = 0.5172669856284999;  // reference solver, 1e-13
}

TEST_CASE("Malthus parameter: constant rates are exact") {
    MalthusData m2(RateFunction::constant(0.4), OffspringLaw::binary());
    CHECK(m2.lambda() == doctest::Approx(0.4).epsilon(1e-11));
    MalthusData m3(RateFunction::constant(0.4), OffspringLaw({{3, 1.0}}));
    CHECK(m3.lambda() == doctest::Approx(0.8).epsilon(1e-11));
}

TEST_CASE("Malthus parameter of the trial rate") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    CHECK(md.lambda() == doctest::Approx(kTrialLambda).epsilon(1e-9));
}

TEST_CASE("normalisation suite on random rates") {
    bhp::Rng rng(21);
    for (int k = 0; k < 10; ++k) {
        RateFunction r = testsupport::random_rate(rng);
        OffspringLaw law = (k % 2) ? OffspringLaw::binary()
                                   : OffspringLaw({{2, 0.5}, {3, 0.5}});
        MalthusData md(r, law);
        auto one = [](double) { return 1.0; };
        // int f_B = 1 (weighted integral at lambda = 0)
        CHECK(MalthusData::weighted_density_integral(r, 0.0, one) ==
              doctest::Approx(1.0).epsilon(1e-8));
        CHECK(bhp::limit_measure_interior(md, one) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(bhp::limit_measure_boundary(md, one) == doctest::Approx(1.0).epsilon(1e-8));
        // int f_{H_B} = 1: the biased mass left beyond any x equals e^{-Lambda_H(x)}
        CHECK(md.biased_cdf(md.x_max()) == doctest::Approx(1.0).epsilon(1e-8));
        // Malthus equation residual at the returned root
        auto resid = law.mean() * MalthusData::weighted_density_integral(r, md.lambda(), one) - 1.0;
        CHECK(std::abs(resid) < 1e-10);
    }
}

TEST_CASE("constant-rate closed forms") {
    const double b = 0.4;
    MalthusData md(RateFunction::constant(b), OffspringLaw::binary());
    const double mb = 2 * b;
    CHECK(md.rho() == doctest::Approx(mb).epsilon(1e-9));
    CHECK(md.tail_biased_rate() == doctest::Approx(mb).epsilon(1e-9));
    for (double x : {0.0, 0.3, 1.0, 2.7, 5.0}) {
        CHECK(md.biased_rate(x) == doctest::Approx(mb).epsilon(1e-9));
        CHECK(md.biased_density(x) == doctest::Approx(mb * std::exp(-mb * x)).epsilon(1e-9));
        CHECK(md.invariant_density(x) == doctest::Approx(mb * std::exp(-mb * x)).epsilon(1e-9));
    }
    CHECK(md.normalizer() == doctest::Approx(mb).epsilon(1e-9));
    CHECK(md.kappa_interior() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(md.kappa_boundary() == doctest::Approx(1.0).epsilon(1e-9));

    MalthusData md3(RateFunction::constant(b), OffspringLaw({{3, 1.0}}));
    CHECK(md3.biased_rate(1.0) == doctest::Approx(3 * b).epsilon(1e-9));
    CHECK(md3.kappa_interior() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(md3.kappa_boundary() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalizer identity c_B = lambda kappa' m") {
    // c_B comes from a direct integral, kappa' from the biased-hazard table;
    // agreement checks the two computation routes against each other
    bhp::Rng rng(33);
    for (int k = 0; k < 6; ++k) {
        MalthusData md(testsupport::random_rate(rng),
                       (k % 2) ? OffspringLaw::binary() : OffspringLaw({{2, 0.25}, {4, 0.75}}));
        CHECK(md.normalizer() ==
              doctest::Approx(md.lambda() * md.kappa_interior() * md.mean_offspring())
                  .epsilon(1e-8));
    }
}

TEST_CASE("lambda is monotone in the rate") {
    bhp::Rng rng(5);
    OffspringLaw law = OffspringLaw::binary();
    for (int k = 0; k < 6; ++k) {
        RateFunction r = testsupport::random_rate(rng);
        RateFunction up = testsupport::shifted_up(r, 0.05 + 0.5 * rng.uniform());
        CHECK(MalthusData(r, law).lambda() <= MalthusData(up, law).lambda() + 1e-12);
    }
}

TEST_CASE("limit measures: constant-rate closed forms") {
    MalthusData md(RateFunction::constant(0.4), OffspringLaw::binary());
    auto id = [](double x) { return x; };
    auto one = [](double) { return 1.0; };
    auto null_set = [](double x) { return x == 0.0 ? 1.0 : 0.0; };
    CHECK(bhp::limit_measure_boundary(md, one) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bhp::limit_measure_interior(md, one) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bhp::limit_measure_boundary(md, id) == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(bhp::limit_measure_interior(md, id) == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(bhp::limit_measure_boundary(md, null_set) == doctest::Approx(0.0));
    // representation of lambda through the two limit measures
    double m = md.mean_offspring();
    double lam_rep = 1.0 / (bhp::limit_measure_interior(md, id) / (m - 1.0) +
                            bhp::limit_measure_boundary(md, id));
    CHECK(lam_rep == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("limit measures: trial rate reference values") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    auto id = [](double x) { return x; };
    CHECK(bhp::limit_measure_interior(md, id) ==
          doctest::Approx(1.0096439218574).epsilon(1e-8));
    CHECK(bhp::limit_measure_boundary(md, id) ==
          doctest::Approx(0.9235937054869).epsilon(1e-8));
    double lam_rep = 1.0 / (bhp::limit_measure_interior(md, id) +
                            bhp::limit_measure_boundary(md, id));
    CHECK(lam_rep == doctest::Approx(md.lambda()).epsilon(1e-8));
    // growing test function is rejected
    CHECK_THROWS_AS(bhp::limit_measure_boundary(md, [](double x) { return std::exp(2.0 * x); }),
                    std::domain_error);
}

TEST_CASE("biased rate of the trial model") {
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    CHECK(md.biased_rate(0.0) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(md.rho() == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(md.tail_biased_rate() == doctest::Approx(md.lambda() + 119.0 / 160.0).epsilon(1e-12));
    // bounded on the whole table range
    CHECK(md.sup_biased_rate() < 1.3);
    for (double x = 0.0; x < md.x_max(); x += 0.37) CHECK(std::isfinite(md.biased_rate(x)));
    // biased hazard dominates lambda here (fast-mixing regime)
    for (double x = 0.0; x < 20.0; x += 0.1) CHECK(md.biased_rate(x) >= md.lambda());
}

TEST_CASE("biased cumulative hazard matches an independent route") {
    // -log(1 - F_{H_B}) computed by Simpson against the table
    MalthusData md(RateFunction::paper_trial(), OffspringLaw::binary());
    for (double x : {0.5, 1.0, 2.0, 4.0, 7.0}) {
        double f = testsupport::simpson([&](double t) { return md.biased_density(t); }, 0.0, x,
                                        40000);
        CHECK(md.biased_cumhaz(x) == doctest::Approx(-std::log1p(-f)).epsilon(1e-8));
    }
    // total biased and invariant masses, Simpson with the analytic tails
    double mass = testsupport::simpson([&](double t) { return md.biased_density(t); }, 0.0,
                                       md.x_max(), 120000);
    mass += std::exp(-md.biased_cumhaz(md.x_max()));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    double mu_mass = testsupport::simpson([&](double t) { return md.invariant_density(t); }, 0.0,
                                          md.x_max(), 120000);
    mu_mass += md.invariant_density(md.x_max()) / md.biased_rate(md.x_max());
    CHECK(mu_mass == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("regime classification") {
    bhp::RateDiagnostics dc =
        bhp::classify_regime(RateFunction::constant(0.5), OffspringLaw::binary());
    CHECK(dc.regime == bhp::Regime::FastMixing);
    CHECK(dc.bbm_member);
    CHECK(dc.envelope_ok);
    CHECK(dc.varpi == doctest::Approx(1.0));
    CHECK(dc.lambda == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(dc.rho == doctest::Approx(1.0).epsilon(1e-9));

    // trial rate: inside the envelope [b, 2b] and fast-mixing, but the
    // monotonicity condition B' - B^2 <= 0 fails near 0 (B'(0) = 5/8 > 0.16),
    // so it is not a member of the smooth subclass
    bhp::RateDiagnostics dt =
        bhp::classify_regime(RateFunction::paper_trial(), OffspringLaw::binary());
    CHECK(dt.regime == bhp::Regime::FastMixing);
    CHECK(dt.envelope_ok);
    CHECK_FALSE(dt.bbm_member);
    CHECK(dt.varpi == doctest::Approx(1.0));

    // step rate with a late high plateau mixes slowly: rho < lambda
    RateFunction slow({RateSegment::polynomial({0.1}, 0.0, 3.0),
                       RateSegment::polynomial({2.0}, 3.0,
                                               std::numeric_limits<double>::infinity())},
                      "step");
    bhp::RateDiagnostics ds = bhp::classify_regime(slow, OffspringLaw::binary());
    CHECK(ds.lambda == doctest::Approx(0.2475428533).epsilon(1e-7));
    CHECK(ds.regime == bhp::Regime::SlowMixing);
    CHECK(ds.lambda > 2.0 * ds.rho);
    CHECK(ds.varpi == doctest::Approx(2.0));
}

TEST_CASE("rate functions v_T and w_T") {
    bhp::RateDiagnostics d;
    d.lambda = 0.5;
    d.rho = 0.8;
    d.varpi = 1.0;
    CHECK(d.v(10.0) == doctest::Approx(std::exp(-0.25 * 10)).epsilon(1e-12));
    // when rho >= lambda the estimator rate reduces to e^{-lambda beta T/(2 beta+1)}
    for (double beta : {0.5, 1.0, 2.0})
        CHECK(d.w(12.0, beta) ==
              doctest::Approx(std::exp(-0.5 * beta / (2 * beta + 1) * 12.0)).epsilon(1e-12));

    bhp::RateDiagnostics s;  // slow regime, lambda > 2 rho
    s.lambda = 1.0;
    s.rho = 0.3;
    CHECK(s.v(7.0) == doctest::Approx(std::exp(-0.3 * 7)).epsilon(1e-12));
    double expo = 0.6 * (2.0 - 0.5 * (1.0 / 0.3 - 1.0)) / 5.0;
    CHECK(s.w(7.0, 2.0) == doctest::Approx(std::exp(-expo * 7)).epsilon(1e-12));

    bhp::RateDiagnostics c;  // critical lambda = 2 rho picks up the slow factor
    c.lambda = 1.0;
    c.rho = 0.5;
    CHECK(c.critical());
    CHECK(c.v(9.0) == doctest::Approx(3.0 * std::exp(-4.5)).epsilon(1e-12));
    // beta - (lambda/rho - 1)/2 = 1/2 at the critical point
    CHECK(c.w(9.0, 1.0) == doctest::Approx(9.0 * std::exp(-1.5)).epsilon(1e-12));
}

TEST_CASE("monotone biased hazard for members of the smooth class") {
    // for members, H_B - lambda >= 0 on the grid
    for (double b : {0.3, 0.7, 1.1}) {
        MalthusData md(RateFunction::constant(b), OffspringLaw({{2, 0.5}, {3, 0.5}}));
        for (double x = 0.0; x < 10.0; x += 0.05)
            CHECK(md.biased_rate(x) - md.lambda() >= -1e-9);
    }
}
