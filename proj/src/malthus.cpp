#include "bhp/malthus.hpp"

#include <algorithm>

namespace bhp {

namespace {

// cut point beyond which sup(B) e^{-(lambda+b) x} is below eps of the scale
double tail_cut(const RateFunction& rate, double lambda, double log_eps = -41.0) {
    double last_bp = rate.breakpoints().empty() ? 0.0 : rate.breakpoints().back();
    double decay = lambda + rate.lower_bound();
    double x = (std::log(std::max(rate.upper_bound(), 1.0)) - log_eps) / decay;
    return last_bp + x;
}

// chunked breakpoint list so adaptive quadrature never sees a very long panel
std::vector<double> quad_cuts(const RateFunction& rate, double a, double b, double chunk) {
    std::vector<double> cuts = rate.breakpoints();
    for (double x = a + chunk; x < b; x += chunk) cuts.push_back(x);
    return cuts;
}

double tail_level(const RateFunction& rate) {
    const RateSegment& last = rate.segments().back();
    return last.kind == RateSegment::Kind::Polynomial ? last.coeffs[0] : last.level;
}

}  // namespace

double MalthusData::weighted_density_integral(const RateFunction& rate, double lambda,
                                              const std::function<double(double)>& g) {
    double xc = tail_cut(rate, lambda);
    auto f = [&](double x) {
        return g(x) * rate(x) * std::exp(-lambda * x - rate.cumulative_hazard(x));
    };
    return quad::integrate_segmented(f, 0.0, xc,
                                     quad_cuts(rate, 0.0, xc, 8.0 / (lambda + rate.lower_bound())));
}

MalthusData::MalthusData(RateFunction rate, OffspringLaw law)
    : rate_(std::move(rate)), law_(std::move(law)) {
    const double m = law_.mean();
    auto one = [](double) { return 1.0; };
    auto residual = [&](double lam) {
        return m * weighted_density_integral(rate_, lam, one) - 1.0;
    };

    // lambda_B is the root of a map strictly decreasing from m-1 >= 1 to -1;
    // it lies in (0, (m-1) sup B], with equality for constant rates.
    double lo = 0.0, hi = (m - 1.0) * rate_.upper_bound() * (1.0 + 1e-6) + 1e-9;
    double rlo = residual(lo), rhi = residual(hi);
    if (!(rlo > 0.0 && rhi < 0.0))
        throw std::runtime_error("solve_malthus: bracket does not change sign (residuals " +
                                 std::to_string(rlo) + ", " + std::to_string(rhi) + ")");
    for (int iter = 0; iter < 80 && hi - lo > 1e-14 * (1.0 + hi); ++iter) {
        double mid = 0.5 * (lo + hi);
        double rm = residual(mid);
        if (rm > 0.0)
            lo = mid, rlo = rm;
        else
            hi = mid, rhi = rm;
    }
    // secant polish
    double a = lo, b = hi, ra = rlo, rb = rhi;
    for (int iter = 0; iter < 8 && std::abs(rb) > 1e-15; ++iter) {
        if (ra == rb) break;
        double c = b - rb * (b - a) / (rb - ra);
        a = b;
        ra = rb;
        b = c;
        rb = residual(b);
    }
    lambda_ = std::abs(rb) < std::abs(ra) ? b : a;
    if (std::abs(residual(lambda_)) > 1e-10)
        throw std::runtime_error("solve_malthus: residual above tolerance");

    build_tables();

    // two routes to the same constant: kappa' from the biased-hazard table,
    // c_B from a direct integral against the analytic density (they must
    // satisfy c_B = lambda kappa' m; tested, not assumed)
    kappa_interior_ = 1.0 / (lambda_ * m * mu_total_);
    kappa_boundary_ = (m - 1.0) * kappa_interior_;
    auto identity = [](double x) { return x; };
    double mean_biased = m * weighted_density_integral(rate_, lambda_, identity);
    c_b_ = 1.0 / mean_biased;
}

void MalthusData::build_tables() {
    const double m = law_.mean();
    const double b = rate_.lower_bound();
    x_max_ = std::min(tail_cut(rate_, lambda_),
                      (rate_.breakpoints().empty() ? 0.0 : rate_.breakpoints().back()) +
                          600.0 / (lambda_ + rate_.upper_bound()));

    // node grid: uniform plus the breakpoints of B (H_B jumps where B does)
    const std::size_t n_uniform = 4096;
    std::vector<double> xs;
    xs.reserve(n_uniform + 8);
    for (std::size_t i = 0; i <= n_uniform; ++i)
        xs.push_back(x_max_ * static_cast<double>(i) / n_uniform);
    for (double bp : rate_.breakpoints())
        if (bp > 0.0 && bp < x_max_) xs.push_back(bp);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double u, double v) { return std::abs(u - v) < 1e-12; }),
             xs.end());
    const std::size_t n = xs.size();

    // R(x) = int_x^inf B e^{-lambda y - Lambda(y)} dy by reverse accumulation;
    // then Lambda_H = -log(m R) and H = B e^{-lambda x - Lambda} / R, all with
    // uniform relative accuracy (no cancellation for x deep in the tail)
    auto integrand = [&](double x) {
        return rate_(x) * std::exp(-lambda_ * x - rate_.cumulative_hazard(x));
    };
    std::vector<double> r(n);
    {
        double far = x_max_ + 41.0 / (lambda_ + b);
        double tail = quad::integrate_segmented(integrand, x_max_, far,
                                                quad_cuts(rate_, x_max_, far, 8.0 / (lambda_ + b)));
        double level = tail_level(rate_);
        tail += rate_(far) * std::exp(-lambda_ * far - rate_.cumulative_hazard(far)) /
                (lambda_ + level);
        r[n - 1] = tail;
        for (std::size_t i = n - 1; i-- > 0;)
            r[i] = r[i + 1] + quad::panel(integrand, xs[i], xs[i + 1]);
    }

    std::vector<double> lam_h(n), h_right(n), h_left(n);
    for (std::size_t i = 0; i < n; ++i) {
        lam_h[i] = -std::log(m * r[i]);
        // H = B e^{-lambda x - Lambda} / R
        double w = -lambda_ * xs[i] - rate_.cumulative_hazard(xs[i]) - std::log(r[i]);
        h_right[i] = rate_(xs[i]) * std::exp(w);
        h_left[i] = rate_.left_limit(xs[i]) * std::exp(w);
    }
    std::vector<double> din(n - 1), dout(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        din[i] = h_right[i];
        dout[i] = h_left[i + 1];
    }
    cumhaz_table_ = HermiteTable(xs, lam_h, std::move(din), std::move(dout));

    // infimum / supremum of H_B over a dense grid plus the analytic limit
    h_tail_ = lambda_ + tail_level(rate_);
    rho_ = h_tail_;
    h_sup_ = h_tail_;
    for (std::size_t i = 0; i < n; ++i) {
        rho_ = std::min({rho_, h_right[i], h_left[i]});
        h_sup_ = std::max({h_sup_, h_right[i], h_left[i]});
    }
    double step = 1e-3 / b;
    for (double x = 0.0; x < x_max_; x += step) {
        double h = cumhaz_table_.slope(x);
        rho_ = std::min(rho_, h);
        h_sup_ = std::max(h_sup_, h);
    }
    if (!(rho_ > 0.0)) throw std::runtime_error("MalthusData: nonpositive rho");

    // cumulative of exp(-Lambda_H) for the invariant distribution
    mu_cum_.assign(n, 0.0);
    auto surv = [&](double x) { return std::exp(-cumhaz_table_.value(x)); };
    for (std::size_t i = 0; i + 1 < n; ++i)
        mu_cum_[i + 1] = mu_cum_[i] + quad::panel(surv, xs[i], xs[i + 1]);
    // linear-extension tail: Lambda_H grows with slope H(x_max) past the table
    mu_total_ = mu_cum_.back() +
                std::exp(-cumhaz_table_.back_y()) / cumhaz_table_.back_slope();
}

double MalthusData::invariant_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    const std::vector<double>& xs = cumhaz_table_.nodes();
    if (x >= xs.back()) {
        double hm = cumhaz_table_.back_slope();
        double part = mu_cum_.back() + std::exp(-cumhaz_table_.back_y()) *
                                           (1.0 - std::exp(-hm * (x - xs.back()))) / hm;
        return part / mu_total_;
    }
    std::size_t i = static_cast<std::size_t>(
                        std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    auto surv = [&](double t) { return std::exp(-cumhaz_table_.value(t)); };
    return (mu_cum_[i] + quad::panel(surv, xs[i], x)) / mu_total_;
}

double MalthusData::sample_invariant(Rng& rng) const {
    double target = rng.uniform() * mu_total_;
    const std::vector<double>& xs = cumhaz_table_.nodes();
    if (target >= mu_cum_.back()) {
        double hm = cumhaz_table_.back_slope();
        double z = (target - mu_cum_.back()) * hm * std::exp(cumhaz_table_.back_y());
        z = std::min(z, 1.0 - 1e-16);
        return xs.back() - std::log1p(-z) / hm;
    }
    std::size_t i = static_cast<std::size_t>(
                        std::upper_bound(mu_cum_.begin(), mu_cum_.end(), target) -
                        mu_cum_.begin()) - 1;
    double lo = xs[i], hi = xs[i + 1];
    auto surv = [&](double t) { return std::exp(-cumhaz_table_.value(t)); };
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 60; ++iter) {
        double g = mu_cum_[i] + quad::panel(surv, xs[i], x) - target;
        if (g > 0.0)
            hi = x;
        else
            lo = x;
        double xn = x - g / surv(x);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 1e-12 * (1.0 + x)) return xn;
        x = xn;
    }
    return x;
}

namespace {

double limit_integral(const MalthusData& md, const std::function<double(double)>& g,
                      bool weight_by_rate) {
    const RateFunction& rate = md.rate();
    double lambda = md.lambda();
    double xc = (rate.breakpoints().empty() ? 0.0 : rate.breakpoints().back()) +
                45.0 / (lambda + rate.lower_bound());
    auto f = [&](double x) {
        double w = std::exp(-lambda * x - rate.cumulative_hazard(x));
        return g(x) * (weight_by_rate ? rate(x) : 1.0) * w;
    };
    // reject test functions growing faster than the exponential tail decays
    double t1 = std::abs(f(xc)), t2 = std::abs(f(1.25 * xc)), t3 = std::abs(f(1.5 * xc));
    if (t1 > 1e-8 || t2 > t1 + 1e-12 || t3 > t2 + 1e-12)
        throw std::domain_error("limit measure: test function not integrable against the tail");
    double chunk = 8.0 / (lambda + rate.lower_bound());
    std::vector<double> cuts = rate.breakpoints();
    for (double x = chunk; x < xc; x += chunk) cuts.push_back(x);
    return quad::integrate_segmented(f, 0.0, xc, cuts, 1e-11);
}

}  // namespace

double limit_measure_boundary(const MalthusData& md, const std::function<double(double)>& g) {
    double m = md.mean_offspring();
    return md.lambda() * m / (m - 1.0) * limit_integral(md, g, false);
}

double limit_measure_interior(const MalthusData& md, const std::function<double(double)>& g) {
    return md.mean_offspring() * limit_integral(md, g, true);
}

bool RateDiagnostics::critical() const {
    return std::abs(lambda - 2.0 * rho) <= 1e-9 * (lambda + 2.0 * rho);
}

double RateDiagnostics::v(double T) const {
    if (critical()) return std::sqrt(T) * std::exp(-0.5 * lambda * T);
    return std::exp(-std::min(rho, 0.5 * lambda) * T);
}

double RateDiagnostics::w(double T, double beta) const {
    double excess = std::max(lambda / rho - 1.0, 0.0);
    double expo = std::min(lambda, 2.0 * rho) * (beta - 0.5 * excess) / (2.0 * beta + 1.0);
    double slow = critical() ? T : 1.0;
    return slow * std::exp(-expo * T);
}

RateDiagnostics classify_regime(const MalthusData& md) {
    RateDiagnostics d;
    d.lambda = md.lambda();
    d.rho = md.rho();
    d.varpi = std::min(std::max(1.0, d.lambda / d.rho), 2.0);
    double tol = 1e-9 * (d.lambda + d.rho);
    if (std::abs(d.lambda - d.rho) <= tol)
        d.regime = Regime::Boundary;
    else if (d.lambda < d.rho)
        d.regime = Regime::FastMixing;
    else
        d.regime = Regime::SlowMixing;

    const RateFunction& rate = md.rate();
    double m = md.mean_offspring();
    double b = rate.lower_bound();
    d.envelope_ok = rate.upper_bound() <= b * m / (m - 1.0) * (1.0 + 1e-9);
    d.derivative_known = true;
    bool cond = d.envelope_ok;
    double step = 1e-3 / b;
    for (double x = 0.0; cond && x < md.x_max(); x += step) {
        double bx = rate(x);
        if (rate.derivative(x) - bx * bx > 1e-9 * (1.0 + bx * bx)) cond = false;
    }
    d.bbm_member = cond;
    return d;
}

RateDiagnostics classify_regime(const RateFunction& rate, const OffspringLaw& law) {
    return classify_regime(MalthusData(rate, law));
}

}  // namespace bhp
