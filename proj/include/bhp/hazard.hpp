#pragma once

#include "bhp/rates.hpp"

namespace bhp {

// Age-dependent jump hazard as seen by the one-dimensional age chain:
// age grows with slope 1, jumps to 0 at rate `rate(age)`.
class AgeHazard {
  public:
    virtual ~AgeHazard() = default;
    virtual double rate(double x) const = 0;
    virtual double cumhaz(double x) const = 0;
    virtual double invert_cumhaz(double e) const = 0;
    virtual double inf_rate() const = 0;
    virtual double sup_rate() const = 0;
};

class RateHazard final : public AgeHazard {
  public:
    explicit RateHazard(RateFunction rate) : rate_(std::move(rate)) {}
    double rate(double x) const override { return rate_(x); }
    double cumhaz(double x) const override { return rate_.cumulative_hazard(x); }
    double invert_cumhaz(double e) const override { return rate_.inverse_cumulative_hazard(e); }
    double inf_rate() const override { return rate_.lower_bound(); }
    double sup_rate() const override { return rate_.upper_bound(); }

  private:
    RateFunction rate_;
};

}  // namespace bhp
