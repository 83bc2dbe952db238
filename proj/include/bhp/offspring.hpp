#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bhp/rng.hpp"

namespace bhp {

// Offspring distribution with finite support on {2, 3, ...}: p_0 = p_1 = 0,
// mean m >= 2. The pair constant m_bar = sum_{i != j} P(nu >= max(i,j))
// reduces to E[nu^2] - m.
class OffspringLaw {
  public:
    // entries (k, p_k) with k >= 2
    explicit OffspringLaw(std::vector<std::pair<int, double>> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) throw std::invalid_argument("OffspringLaw: empty support");
        double total = 0.0;
        for (auto [k, p] : probs_) {
            if (k < 2) throw std::invalid_argument("OffspringLaw: support must start at 2");
            if (p < 0.0) throw std::invalid_argument("OffspringLaw: negative probability");
            total += p;
            mean_ += k * p;
            second_moment_ += static_cast<double>(k) * k * p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("OffspringLaw: probabilities must sum to 1");
        cdf_.reserve(probs_.size());
        double c = 0.0;
        for (auto [k, p] : probs_) cdf_.push_back(c += p);
        cdf_.back() = 1.0;
    }

    static OffspringLaw binary() { return OffspringLaw({{2, 1.0}}); }

    double mean() const { return mean_; }
    double second_moment() const { return second_moment_; }
    double pair_constant() const { return second_moment_ - mean_; }  // m_bar
    const std::vector<std::pair<int, double>>& probabilities() const { return probs_; }

    int sample(Rng& rng) const {
        double u = rng.uniform();
        for (std::size_t i = 0; i < cdf_.size(); ++i)
            if (u < cdf_[i]) return probs_[i].first;
        return probs_.back().first;
    }

  private:
    std::vector<std::pair<int, double>> probs_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
};

}  // namespace bhp
