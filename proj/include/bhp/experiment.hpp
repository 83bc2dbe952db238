#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bhp/estimate.hpp"
#include "bhp/malthus.hpp"
#include "bhp/tree.hpp"

namespace bhp {

struct GridSpec {
    double lo = 0.25;
    double hi = 2.5;
    double step = 0.01;
};

struct BandwidthRule {
    enum class Kind { RuleOfThumb, Theoretical, Fixed };
    Kind kind = Kind::RuleOfThumb;
    double beta = 1.0;     // Theoretical
    double fixed_h = 0.1;  // Fixed
};

struct ExperimentConfig {
    RateFunction rate = RateFunction::paper_trial();
    OffspringLaw law = OffspringLaw::binary();
    std::vector<double> horizons = {11.0, 13.0, 15.0};
    std::size_t replicates = 50;
    GridSpec grid;
    std::string kernel = "gaussian";
    BandwidthRule bandwidth;
    std::uint64_t seed = 1;
    std::size_t max_nodes = 10'000'000;
    unsigned threads = 0;  // 0: hardware concurrency
    double band_level = 0.95;
};

struct ReplicateRow {
    double horizon = 0.0;
    std::size_t replicate = 0;
    std::size_t n_interior = 0;
    std::size_t n_boundary = 0;
    double m_hat = 0.0;
    double lambda_hat = 0.0;
    double bandwidth = 0.0;
    double error = 0.0;
    bool failed = false;  // population cap
};

struct HorizonAggregate {
    double horizon = 0.0;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    double mean_error = 0.0;
    double sd_error = 0.0;
    double mean_interior = 0.0;
    // population spread, Table-1 style
    double min_interior = 0.0, q1_interior = 0.0, median_interior = 0.0;
    double q3_interior = 0.0, max_interior = 0.0, sd_interior = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    double lambda_true = 0.0;
    double rho_true = 0.0;
    std::vector<double> grid;
    std::vector<ReplicateRow> rows;                     // ordered by (T, replicate)
    std::vector<HorizonAggregate> aggregates;           // per horizon
    std::vector<std::vector<std::vector<double>>> estimates;  // [horizon][replicate][grid]
    bool valid = true;  // <= 5% failed replicates everywhere
};

ExperimentReport run_table(const ExperimentConfig& config);

struct RegressionResult {
    double slope = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// least-squares slope of log mean error against T, bootstrap CI over replicates
RegressionResult rate_regression(const ExperimentReport& report, std::size_t n_boot = 1000,
                                 std::uint64_t seed = 7);

struct Bands {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> mean;
};

// pointwise empirical quantiles at (1 -/+ level)/2 across replicates
Bands confidence_bands(const std::vector<std::vector<double>>& estimates, double level);

struct BiasDiagnostic {
    double ks_plain = 0.0;   // against F_B
    double ks_biased = 0.0;  // against F_{H_B}
    bool skipped = false;    // sample too small for a meaningful comparison
    bool biased_wins = false;
};

BiasDiagnostic bias_diagnostic(const ObservedSample& sample, const MalthusData& md);

// raw.csv, aggregate.csv, bands_T*.csv and summary.json under out_dir
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace bhp
