#include "bhp/rates.hpp"

#include <algorithm>

namespace bhp {

RateFunction::RateFunction(std::vector<RateSegment> segments, std::string name)
    : segments_(std::move(segments)), name_(std::move(name)) {
    validate_and_finalize();
}

RateFunction RateFunction::constant(double b) {
    RateFunction r({RateSegment::polynomial({b}, 0.0, std::numeric_limits<double>::infinity())},
                   "constant");
    return r;
}

RateFunction RateFunction::paper_trial() {
    std::vector<RateSegment> segs;
    segs.push_back(RateSegment::polynomial({0.4, 5.0 / 8.0, -7.0 / 8.0, 1.0 / 3.0}, 0.0, 1.5));
    segs.push_back(RateSegment::exp_approach(119.0 / 160.0, -0.25, 1.0, 1.5,
                                             std::numeric_limits<double>::infinity()));
    return RateFunction(std::move(segs), "paper-trial");
}

std::size_t RateFunction::segment_index(double x) const {
    if (x < 0.0) throw std::domain_error("RateFunction: negative age");
    // breakpoints_ holds segment starts after the first
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return static_cast<std::size_t>(it - breakpoints_.begin());
}

double RateFunction::left_limit(double x) const {
    std::size_t i = segment_index(x);
    if (i > 0 && x == segments_[i].start) return segments_[i - 1].value(x);
    return segments_[i].value(x);
}

double RateFunction::cumulative_hazard(double x) const {
    std::size_t i = segment_index(x);
    return cum_at_start_[i] + segments_[i].cumhaz_from_start(x);
}

double RateFunction::inverse_cumulative_hazard(double e) const {
    if (e < 0.0) throw std::domain_error("inverse_cumulative_hazard: negative value");
    if (e == 0.0) return 0.0;
    auto it = std::upper_bound(cum_at_start_.begin(), cum_at_start_.end(), e);
    std::size_t i = static_cast<std::size_t>(it - cum_at_start_.begin()) - 1;
    const RateSegment& seg = segments_[i];
    double target = e - cum_at_start_[i];  // solve seg.cumhaz_from_start(x) = target
    double lo = seg.start;
    double hi = std::isfinite(seg.end) ? seg.end : seg.start + target / lower_ + 1.0;
    double x = seg.start + target / std::max(seg.value(seg.start), lower_);
    x = std::clamp(x, lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        double g = seg.cumhaz_from_start(x) - target;
        if (g > 0.0)
            hi = x;
        else
            lo = x;
        double step = g / seg.value(x);
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 1e-14 * (1.0 + std::abs(x))) return xn;
        x = xn;
    }
    return x;
}

void RateFunction::validate_and_finalize() {
    if (segments_.empty()) throw std::invalid_argument("RateFunction: no segments");
    if (segments_.front().start != 0.0)
        throw std::invalid_argument("RateFunction: first segment must start at 0");
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
        if (!(segments_[i].end == segments_[i + 1].start))
            throw std::invalid_argument("RateFunction: segments must be contiguous");
        if (!(segments_[i].end > segments_[i].start))
            throw std::invalid_argument("RateFunction: empty segment");
    }
    if (std::isfinite(segments_.back().end))
        throw std::invalid_argument("RateFunction: last segment must extend to infinity");
    const RateSegment& last = segments_.back();
    if (last.kind == RateSegment::Kind::Polynomial && last.coeffs.size() > 1)
        throw std::invalid_argument(
            "RateFunction: unbounded tail; last segment must be constant or exp-approach");
    if (last.kind == RateSegment::Kind::ExpApproach && last.decay < 0.0)
        throw std::invalid_argument("RateFunction: diverging exponential tail");

    cum_at_start_.assign(segments_.size(), 0.0);
    breakpoints_.clear();
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
        cum_at_start_[i + 1] =
            cum_at_start_[i] + segments_[i].cumhaz_from_start(segments_[i].end);
        breakpoints_.push_back(segments_[i].end);
    }

    // bounds by dense sampling per segment, endpoints and tail limits exact
    lower_ = std::numeric_limits<double>::infinity();
    upper_ = -std::numeric_limits<double>::infinity();
    auto consider = [this](double v) {
        lower_ = std::min(lower_, v);
        upper_ = std::max(upper_, v);
    };
    for (const RateSegment& seg : segments_) {
        double hi = std::isfinite(seg.end) ? seg.end : seg.start + 60.0 / std::max(seg.level, 0.1);
        consider(seg.value(seg.start));
        consider(seg.value(hi));
        const int n = 4096;
        for (int k = 1; k < n; ++k)
            consider(seg.value(seg.start + (hi - seg.start) * k / n));
        if (seg.kind == RateSegment::Kind::ExpApproach) consider(seg.level);
    }
    if (!(lower_ > 0.0))
        throw std::invalid_argument("RateFunction: rate must be bounded away from zero");
}

}  // namespace bhp
