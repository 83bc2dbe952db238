#pragma once

// shared test helpers: an independent composite-Simpson oracle, random rate
// functions inside the bounded envelope, and basic sample statistics

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bhp/offspring.hpp"
#include "bhp/rates.hpp"
#include "bhp/rng.hpp"

namespace testsupport {

// composite Simpson; independent of the library's quadrature path
template <class F>
double simpson(const F& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// random rate function with positive lower bound: a few constant pieces, an
// optional bounded quadratic piece, and an exponential-approach tail
inline bhp::RateFunction random_rate(bhp::Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        double b = 0.25 + 0.45 * rng.uniform();
        double cap = b * (1.4 + 1.1 * rng.uniform());
        auto pick = [&] { return b + (cap - b) * rng.uniform(); };
        std::vector<bhp::RateSegment> segs;
        double x = 0.0;
        int pieces = 1 + static_cast<int>(rng.uniform() * 2.0);
        for (int i = 0; i < pieces; ++i) {
            double len = 0.5 + 1.5 * rng.uniform();
            if (rng.uniform() < 0.35) {
                // quadratic through three random values on the piece
                double y0 = pick(), y1 = pick(), y2 = pick();
                double s = x, e = x + len, mid = 0.5 * (s + e);
                double denom = (s - mid) * (s - e) * (mid - e);
                double a2 = (e * (y1 - y0) + mid * (y0 - y2) + s * (y2 - y1)) / denom;
                double a1 = (e * e * (y0 - y1) + mid * mid * (y2 - y0) + s * s * (y1 - y2)) / denom;
                double a0 = y0 - a1 * s - a2 * s * s;
                segs.push_back(bhp::RateSegment::polynomial({a0, a1, a2}, s, e));
            } else {
                segs.push_back(bhp::RateSegment::polynomial({pick()}, x, x + len));
            }
            x += len;
        }
        double level = pick(), start_value = pick();
        segs.push_back(bhp::RateSegment::exp_approach(
            level, start_value - level, 0.3 + 1.7 * rng.uniform(), x,
            std::numeric_limits<double>::infinity()));
        try {
            bhp::RateFunction r(std::move(segs), "random");
            if (r.lower_bound() >= 0.9 * b && r.upper_bound() <= 1.2 * cap) return r;
        } catch (const std::invalid_argument&) {
        }
    }
    return bhp::RateFunction::constant(0.5);
}

// shift a rate function upward by delta (pointwise larger rate)
inline bhp::RateFunction shifted_up(const bhp::RateFunction& r, double delta) {
    std::vector<bhp::RateSegment> segs = r.segments();
    for (bhp::RateSegment& s : segs) {
        if (s.kind == bhp::RateSegment::Kind::Polynomial)
            s.coeffs[0] += delta;
        else
            s.level += delta;
    }
    return bhp::RateFunction(std::move(segs), r.name() + "+shift");
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    double m = mean(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// two-sample Kolmogorov-Smirnov statistic
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

// one-sample Kolmogorov-Smirnov statistic against a cdf
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double c = cdf(sample[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return d;
}

}  // namespace testsupport
