#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhp {

// One piece of a division rate. Two analytic forms cover the config grammar:
//   Polynomial:   B(x) = sum_i coeffs[i] * x^i            (global coordinates)
//   ExpApproach:  B(x) = level + amp * exp(-decay*(x - start))
// Both have closed-form antiderivatives, which keeps the cumulative hazard
// exact and lifetime inversion cheap.
struct RateSegment {
    enum class Kind { Polynomial, ExpApproach };

    Kind kind = Kind::Polynomial;
    double start = 0.0;
    double end = std::numeric_limits<double>::infinity();
    std::vector<double> coeffs;  // Polynomial
    double level = 0.0;          // ExpApproach
    double amp = 0.0;
    double decay = 0.0;

    static RateSegment polynomial(std::vector<double> c, double start, double end) {
        RateSegment s;
        s.kind = Kind::Polynomial;
        s.coeffs = std::move(c);
        s.start = start;
        s.end = end;
        return s;
    }
    static RateSegment exp_approach(double level, double amp, double decay,
                                    double start, double end) {
        RateSegment s;
        s.kind = Kind::ExpApproach;
        s.level = level;
        s.amp = amp;
        s.decay = decay;
        s.start = start;
        s.end = end;
        return s;
    }

    double value(double x) const {
        if (kind == Kind::Polynomial) {
            double v = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
            return v;
        }
        return level + amp * std::exp(-decay * (x - start));
    }

    double derivative(double x) const {
        if (kind == Kind::Polynomial) {
            double v = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 1;)
                v = v * x + coeffs[i] * static_cast<double>(i);
            return v;
        }
        return -decay * amp * std::exp(-decay * (x - start));
    }

    // int_start^x of the segment value
    double cumhaz_from_start(double x) const {
        if (kind == Kind::Polynomial) {
            auto anti = [this](double t) {
                double v = 0.0;
                for (std::size_t i = coeffs.size(); i-- > 0;)
                    v = v * t + coeffs[i] / static_cast<double>(i + 1);
                return v * t;
            };
            return anti(x) - anti(start);
        }
        if (decay == 0.0) return (level + amp) * (x - start);
        return level * (x - start) +
               amp / decay * (1.0 - std::exp(-decay * (x - start)));
    }
};

// Division rate B(x): piecewise-analytic, bounded away from zero, with exact
// cumulative hazard and O(1)-amortized hazard inversion. The positive lower
// bound guarantees a divergent cumulative hazard, hence finite lifetimes.
class RateFunction {
  public:
    RateFunction() = default;
    explicit RateFunction(std::vector<RateSegment> segments, std::string name = "custom");

    static RateFunction constant(double b);
    // Trial rate of the reference experiment: cubic on [0, 3/2], exponential
    // approach to 119/160 beyond.
    static RateFunction paper_trial();

    double operator()(double x) const { return segments_[segment_index(x)].value(x); }
    double derivative(double x) const { return segments_[segment_index(x)].derivative(x); }

    // value from the left; differs from operator() only at a breakpoint of a
    // discontinuous rate
    double left_limit(double x) const;

    // Lambda(x) = int_0^x B, exact per-segment antiderivatives.
    double cumulative_hazard(double x) const;

    // Solves Lambda(x) = e for x >= 0 (Newton with bisection safeguard).
    double inverse_cumulative_hazard(double e) const;

    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }
    const std::string& name() const { return name_; }
    const std::vector<RateSegment>& segments() const { return segments_; }

    // Segment boundaries in (0, inf); integrands built from B should be split here.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

  private:
    std::size_t segment_index(double x) const;
    void validate_and_finalize();

    std::vector<RateSegment> segments_;
    std::vector<double> cum_at_start_;  // Lambda at each segment start
    std::vector<double> breakpoints_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::string name_;
};

}  // namespace bhp
