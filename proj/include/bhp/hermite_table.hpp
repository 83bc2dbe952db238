#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bhp {

// Piecewise-cubic Hermite interpolant of an increasing function, with
// two-sided slopes so the derivative may jump at nodes (the biased rate does
// when B does). Linear continuation beyond the last node.
class HermiteTable {
  public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> x, std::vector<double> y,
                 std::vector<double> slope_in, std::vector<double> slope_out)
        : x_(std::move(x)), y_(std::move(y)), din_(std::move(slope_in)),
          dout_(std::move(slope_out)) {
        if (x_.size() < 2 || y_.size() != x_.size() || din_.size() + 1 != x_.size() ||
            dout_.size() + 1 != x_.size())
            throw std::invalid_argument("HermiteTable: inconsistent sizes");
    }

    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }
    double back_y() const { return y_.back(); }
    double back_slope() const { return dout_.back(); }

    double value(double x) const {
        if (x >= x_.back()) return y_.back() + dout_.back() * (x - x_.back());
        std::size_t i = interval(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * din_[i] + h01 * y_[i + 1] + h11 * h * dout_[i];
    }

    double slope(double x) const {
        if (x >= x_.back()) return dout_.back();
        std::size_t i = interval(x);
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double g00 = 6 * t * (t - 1) / h;
        double g10 = (1 - t) * (1 - 3 * t);
        double g01 = -g00;
        double g11 = t * (3 * t - 2);
        return g00 * y_[i] + g10 * din_[i] + g01 * y_[i + 1] + g11 * dout_[i];
    }

    // inverse of value(); requires monotone table
    double invert(double y) const {
        if (y <= y_.front()) return x_.front();
        if (y >= y_.back()) return x_.back() + (y - y_.back()) / dout_.back();
        std::size_t i = static_cast<std::size_t>(
                            std::upper_bound(y_.begin(), y_.end(), y) - y_.begin()) - 1;
        double lo = x_[i], hi = x_[i + 1];
        double x = lo + (hi - lo) * (y - y_[i]) / (y_[i + 1] - y_[i]);
        for (int iter = 0; iter < 100; ++iter) {
            double g = value(x) - y;
            if (g > 0.0)
                hi = x;
            else
                lo = x;
            double xn = x - g / slope(x);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (std::abs(xn - x) <= 1e-14 * (1.0 + std::abs(x))) return xn;
            x = xn;
        }
        return x;
    }

    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }

  private:
    std::size_t interval(double x) const {
        if (x <= x_.front()) return 0;
        std::size_t i = static_cast<std::size_t>(
                            std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_, y_, din_, dout_;
};

}  // namespace bhp
