#include "bhp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace bhp {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ExperimentReport run_table(const ExperimentConfig& config) {
    if (config.replicates < 1) throw std::invalid_argument("run_table: need replicates >= 1");
    for (std::size_t i = 0; i + 1 < config.horizons.size(); ++i)
        if (!(config.horizons[i] < config.horizons[i + 1]))
            throw std::invalid_argument("run_table: horizons must be increasing");

    ExperimentReport report;
    report.config = config;
    MalthusData md(config.rate, config.law);
    report.lambda_true = md.lambda();
    report.rho_true = md.rho();
    report.grid = make_grid(config.grid.lo, config.grid.hi, config.grid.step);

    const std::size_t n_h = config.horizons.size();
    const std::size_t m = config.replicates;
    report.rows.assign(n_h * m, ReplicateRow{});
    report.estimates.assign(n_h, std::vector<std::vector<double>>(m));

    Kernel kernel = kernel_by_name(config.kernel);
    auto truth = [&](double x) { return config.rate(x); };

    auto run_one = [&](std::size_t task) {
        std::size_t hi = task / m, rep = task % m;
        double T = config.horizons[hi];
        ReplicateRow row;
        row.horizon = T;
        row.replicate = rep;
        Rng rng = Rng::stream(config.seed, hi * 1000003ULL + rep);
        SimLimits limits;
        limits.max_nodes = config.max_nodes;
        limits.lambda_hint = report.lambda_true;
        try {
            PopulationTree tree = simulate_tree(config.rate, config.law, T, rng, limits);
            ObservedSample sample = extract_sample(tree);
            row.n_interior = tree.interior_count;
            row.n_boundary = tree.boundary_count;
            row.m_hat = estimate_m(sample);
            row.lambda_hat = estimate_lambda(sample, row.m_hat);
            switch (config.bandwidth.kind) {
                case BandwidthRule::Kind::RuleOfThumb:
                    row.bandwidth = bandwidth_rule_of_thumb(sample.interior_ages);
                    break;
                case BandwidthRule::Kind::Theoretical:
                    row.bandwidth = bandwidth_theoretical(row.lambda_hat, config.bandwidth.beta, T);
                    break;
                case BandwidthRule::Kind::Fixed:
                    row.bandwidth = config.bandwidth.fixed_h;
                    break;
            }
            EstimationResult est = estimate_division_rate(sample, row.m_hat, row.lambda_hat,
                                                          kernel, row.bandwidth, report.grid);
            row.error = relative_error(est.values, truth, report.grid);
            report.estimates[hi][rep] = std::move(est.values);
        } catch (const PopulationCapError&) {
            row.failed = true;
        } catch (const std::invalid_argument&) {
            row.failed = true;  // degenerate sample (e.g. no divisions at a tiny horizon)
        }
        report.rows[task] = row;
    };

    std::size_t n_tasks = n_h * m;
    unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, 64));
    if (n_threads == 1 || n_tasks < 2) {
        for (std::size_t t = 0; t < n_tasks; ++t) run_one(t);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < n_tasks; t += n_threads) run_one(t);
            });
        for (auto& th : pool) th.join();
    }

    // aggregates, a deterministic fold in (T, replicate) order
    for (std::size_t hi = 0; hi < n_h; ++hi) {
        HorizonAggregate agg;
        agg.horizon = config.horizons[hi];
        std::vector<double> errs, interiors;
        for (std::size_t rep = 0; rep < m; ++rep) {
            const ReplicateRow& row = report.rows[hi * m + rep];
            if (row.failed) {
                ++agg.n_failed;
                continue;
            }
            ++agg.n_ok;
            errs.push_back(row.error);
            interiors.push_back(static_cast<double>(row.n_interior));
        }
        agg.mean_error = mean_of(errs);
        agg.sd_error = sd_of(errs);
        agg.mean_interior = mean_of(interiors);
        std::sort(interiors.begin(), interiors.end());
        if (!interiors.empty()) {
            agg.min_interior = interiors.front();
            agg.q1_interior = quantile_sorted(interiors, 0.25);
            agg.median_interior = quantile_sorted(interiors, 0.5);
            agg.q3_interior = quantile_sorted(interiors, 0.75);
            agg.max_interior = interiors.back();
            agg.sd_interior = sd_of(interiors);
        }
        if (agg.n_failed * 20 > m) report.valid = false;  // > 5% failed
        report.aggregates.push_back(agg);
    }
    return report;
}

RegressionResult rate_regression(const ExperimentReport& report, std::size_t n_boot,
                                 std::uint64_t seed) {
    const std::size_t n_h = report.aggregates.size();
    if (n_h < 3) throw std::invalid_argument("rate_regression: need at least 3 horizons");

    std::vector<std::vector<double>> errs(n_h);
    for (const ReplicateRow& row : report.rows)
        if (!row.failed)
            for (std::size_t hi = 0; hi < n_h; ++hi)
                if (row.horizon == report.aggregates[hi].horizon) errs[hi].push_back(row.error);

    auto slope_of = [&](const std::vector<double>& logmeans) {
        double tbar = 0.0;
        for (const auto& a : report.aggregates) tbar += a.horizon;
        tbar /= static_cast<double>(n_h);
        double num = 0.0, den = 0.0;
        for (std::size_t hi = 0; hi < n_h; ++hi) {
            double dt = report.aggregates[hi].horizon - tbar;
            num += dt * logmeans[hi];
            den += dt * dt;
        }
        return num / den;
    };

    std::vector<double> log_means(n_h);
    for (std::size_t hi = 0; hi < n_h; ++hi) log_means[hi] = std::log(mean_of(errs[hi]));
    RegressionResult res;
    res.slope = slope_of(log_means);

    Rng rng(seed);
    std::vector<double> boot;
    boot.reserve(n_boot);
    std::vector<double> lm(n_h);
    for (std::size_t b = 0; b < n_boot; ++b) {
        for (std::size_t hi = 0; hi < n_h; ++hi) {
            const std::vector<double>& e = errs[hi];
            double acc = 0.0;
            for (std::size_t i = 0; i < e.size(); ++i) acc += e[rng.uniform_index(e.size())];
            lm[hi] = std::log(acc / static_cast<double>(e.size()));
        }
        boot.push_back(slope_of(lm));
    }
    std::sort(boot.begin(), boot.end());
    res.ci_lo = quantile_sorted(boot, 0.025);
    res.ci_hi = quantile_sorted(boot, 0.975);
    return res;
}

Bands confidence_bands(const std::vector<std::vector<double>>& estimates, double level) {
    if (estimates.empty()) throw std::invalid_argument("confidence_bands: no estimates");
    if (!(level > 0.0 && level <= 1.0))
        throw std::invalid_argument("confidence_bands: level in (0, 1]");
    std::size_t n_grid = 0;
    for (const auto& e : estimates)
        if (!e.empty()) n_grid = e.size();
    Bands bands;
    std::vector<double> column;
    for (std::size_t j = 0; j < n_grid; ++j) {
        column.clear();
        for (const auto& e : estimates)
            if (!e.empty()) column.push_back(e[j]);
        std::sort(column.begin(), column.end());
        bands.lower.push_back(quantile_sorted(column, 0.5 * (1.0 - level)));
        bands.upper.push_back(quantile_sorted(column, 0.5 * (1.0 + level)));
        bands.mean.push_back(mean_of(column));
    }
    return bands;
}

BiasDiagnostic bias_diagnostic(const ObservedSample& sample, const MalthusData& md) {
    BiasDiagnostic d;
    if (sample.interior_ages.size() < 30) {
        d.skipped = true;
    }
    std::vector<double> ages(sample.interior_ages.begin(), sample.interior_ages.end());
    std::sort(ages.begin(), ages.end());
    double n = static_cast<double>(ages.size());
    double dp = 0.0, db = 0.0;
    for (std::size_t i = 0; i < ages.size(); ++i) {
        double fp = 1.0 - lifetime_survival(md.rate(), ages[i]);
        double fb = md.biased_cdf(ages[i]);
        dp = std::max({dp, std::abs(fp - static_cast<double>(i) / n),
                       std::abs(static_cast<double>(i + 1) / n - fp)});
        db = std::max({db, std::abs(fb - static_cast<double>(i) / n),
                       std::abs(static_cast<double>(i + 1) / n - fb)});
    }
    d.ks_plain = dp;
    d.ks_biased = db;
    d.biased_wins = db < dp;
    return d;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    std::ofstream raw(out_dir / "raw.csv");
    raw << "T,replicate,n_interior,n_boundary,m_hat,lambda_hat,bandwidth,error,failed\n";
    for (const ReplicateRow& r : report.rows)
        raw << fmt(r.horizon) << ',' << r.replicate << ',' << r.n_interior << ','
            << r.n_boundary << ',' << fmt(r.m_hat) << ',' << fmt(r.lambda_hat) << ','
            << fmt(r.bandwidth) << ',' << fmt(r.error) << ',' << (r.failed ? 1 : 0) << '\n';

    std::ofstream agg(out_dir / "aggregate.csv");
    agg << "T,n_ok,n_failed,mean_interior,mean_error,sd_error\n";
    for (const HorizonAggregate& a : report.aggregates)
        agg << fmt(a.horizon) << ',' << a.n_ok << ',' << a.n_failed << ','
            << fmt(a.mean_interior) << ',' << fmt(a.mean_error) << ',' << fmt(a.sd_error)
            << '\n';

    for (std::size_t hi = 0; hi < report.aggregates.size(); ++hi) {
        Bands bands = confidence_bands(report.estimates[hi], report.config.band_level);
        char name[64];
        std::snprintf(name, sizeof(name), "bands_T%g.csv", report.aggregates[hi].horizon);
        std::ofstream bf(out_dir / name);
        bf << "x,mean,lo,hi\n";
        for (std::size_t j = 0; j < report.grid.size(); ++j)
            bf << fmt(report.grid[j]) << ',' << fmt(bands.mean[j]) << ','
               << fmt(bands.lower[j]) << ',' << fmt(bands.upper[j]) << '\n';
    }

    nlohmann::json summary;
    summary["lambda"] = report.lambda_true;
    summary["rho"] = report.rho_true;
    summary["seed"] = report.config.seed;
    summary["replicates"] = report.config.replicates;
    summary["kernel"] = report.config.kernel;
    summary["valid"] = report.valid;
    nlohmann::json rows = nlohmann::json::array();
    for (const HorizonAggregate& a : report.aggregates) {
        rows.push_back({{"T", a.horizon},
                        {"n_ok", a.n_ok},
                        {"n_failed", a.n_failed},
                        {"mean_error", a.mean_error},
                        {"sd_error", a.sd_error},
                        {"interior", {{"min", a.min_interior},
                                      {"q1", a.q1_interior},
                                      {"median", a.median_interior},
                                      {"mean", a.mean_interior},
                                      {"q3", a.q3_interior},
                                      {"max", a.max_interior},
                                      {"sd", a.sd_interior}}}});
    }
    summary["horizons"] = rows;
    if (report.aggregates.size() >= 3) {
        RegressionResult reg = rate_regression(report);
        summary["regression"] = {{"slope", reg.slope},
                                 {"ci_lo", reg.ci_lo},
                                 {"ci_hi", reg.ci_hi},
                                 {"expected_slope", -2.0 * report.lambda_true / 5.0}};
    }
    std::ofstream js(out_dir / "summary.json");
    js << summary.dump(2) << '\n';
}

}  // namespace bhp
