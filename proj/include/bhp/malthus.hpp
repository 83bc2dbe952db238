#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhp/hazard.hpp"
#include "bhp/hermite_table.hpp"
#include "bhp/offspring.hpp"
#include "bhp/quad.hpp"
#include "bhp/rates.hpp"
#include "bhp/rng.hpp"

namespace bhp {

// lifetime density f_B(x) = B(x) exp(-int_0^x B)
inline double lifetime_density(const RateFunction& rate, double x) {
    return rate(x) * std::exp(-rate.cumulative_hazard(x));
}

inline double lifetime_survival(const RateFunction& rate, double x) {
    return std::exp(-rate.cumulative_hazard(x));
}

// Everything the model determines once (B, p) are fixed: the Malthus
// parameter, the size-biased lifetime law along a tagged branch, the
// invariant age distribution of the tagged chain and the renewal constants
// for the expected population counts.
class MalthusData {
  public:
    MalthusData(RateFunction rate, OffspringLaw law);

    double lambda() const { return lambda_; }
    double rho() const { return rho_; }          // inf of the biased rate
    double sup_biased_rate() const { return h_sup_; }
    double tail_biased_rate() const { return h_tail_; }  // lim H_B(x), x -> inf
    double kappa_boundary() const { return kappa_boundary_; }
    double kappa_interior() const { return kappa_interior_; }
    double normalizer() const { return c_b_; }   // c_B of the invariant density
    double x_max() const { return x_max_; }

    const RateFunction& rate() const { return rate_; }
    const OffspringLaw& law() const { return law_; }
    double mean_offspring() const { return law_.mean(); }

    // biased division rate H_B and its integrated objects
    double biased_rate(double x) const { return cumhaz_table_.slope(x); }
    double biased_cumhaz(double x) const { return cumhaz_table_.value(x); }
    double invert_biased_cumhaz(double e) const { return cumhaz_table_.invert(e); }
    double biased_density(double x) const {  // f_{H_B} = m e^{-lambda x} f_B, exact
        return law_.mean() * std::exp(-lambda_ * x) * lifetime_density(rate_, x);
    }
    double biased_cdf(double x) const { return -std::expm1(-biased_cumhaz(x)); }

    // invariant age distribution mu_B(x) = c_B exp(-int_0^x H_B)
    double invariant_density(double x) const { return c_b_ * std::exp(-biased_cumhaz(x)); }
    double invariant_cdf(double x) const;
    double sample_invariant(Rng& rng) const;

    // age-chain hazard views
    class BiasedHazard final : public AgeHazard {
      public:
        explicit BiasedHazard(const MalthusData& md) : md_(md) {}
        double rate(double x) const override { return md_.biased_rate(x); }
        double cumhaz(double x) const override { return md_.biased_cumhaz(x); }
        double invert_cumhaz(double e) const override { return md_.invert_biased_cumhaz(e); }
        double inf_rate() const override { return md_.rho(); }
        double sup_rate() const override { return md_.h_sup_; }

      private:
        const MalthusData& md_;
    };
    BiasedHazard biased_hazard() const { return BiasedHazard(*this); }

    // int_0^inf g(x) B(x) e^{-lambda x - int_0^x B} dx for the given lambda
    static double weighted_density_integral(const RateFunction& rate, double lambda,
                                            const std::function<double(double)>& g);

  private:
    void build_tables();

    RateFunction rate_;
    OffspringLaw law_;
    double lambda_ = 0.0;
    double rho_ = 0.0;
    double h_sup_ = 0.0;
    double h_tail_ = 0.0;
    double kappa_boundary_ = 0.0;
    double kappa_interior_ = 0.0;
    double c_b_ = 0.0;
    double x_max_ = 0.0;

    HermiteTable cumhaz_table_;        // Lambda_H with slopes H_B
    std::vector<double> mu_cum_;       // int_0^{x_i} e^{-Lambda_H}
    double mu_total_ = 0.0;            // int_0^inf e^{-Lambda_H}
};

// limiting empirical measures of the observation scheme
// dE_B(g)   = lambda m/(m-1) int g(x) e^{-lambda x} e^{-int_0^x B} dx
// E̊_B(g)   = m int g(x) e^{-lambda x} f_B(x) dx = int g f_{H_B}
double limit_measure_boundary(const MalthusData& md, const std::function<double(double)>& g);
double limit_measure_interior(const MalthusData& md, const std::function<double(double)>& g);

enum class Regime { FastMixing, SlowMixing, Boundary };  // B+, B-, lambda = rho

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::FastMixing: return "B+";
        case Regime::SlowMixing: return "B-";
        default: return "both-boundary";
    }
}

// Rate diagnostics: lambda vs rho ordering, membership of the
// monotone-biased-rate class {b <= B <= m b/(m-1), B' - B^2 <= 0}, and the
// theoretical convergence-rate functions.
struct RateDiagnostics {
    double lambda = 0.0;
    double rho = 0.0;
    double varpi = 0.0;  // min{max{1, lambda/rho}, 2}
    Regime regime = Regime::FastMixing;
    bool envelope_ok = false;        // b <= B <= m b/(m-1)
    bool derivative_known = true;
    bool bbm_member = false;         // meaningful only if derivative_known

    bool critical() const;  // lambda == 2 rho (up to roundoff)

    // empirical-measure rate v_T and estimator rate w_T(beta)
    double v(double T) const;
    double w(double T, double beta) const;
};

RateDiagnostics classify_regime(const RateFunction& rate, const OffspringLaw& law);
RateDiagnostics classify_regime(const MalthusData& md);

}  // namespace bhp
