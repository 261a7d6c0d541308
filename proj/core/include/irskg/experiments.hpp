#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irskg/optimizer.hpp"
#include "irskg/probing.hpp"
#include "irskg/quantize.hpp"
#include "irskg/scenario.hpp"

namespace irskg {

enum class Scheme { kOptimal, kRandomPhase, kNoIrs };

const char* scheme_name(Scheme s);

// Accepts "optimal", "random-phase" and "no-irs". Throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);

struct ExperimentPlan {
    ScenarioConfig config;                        // seed comes from config.seed
    std::vector<int> irs_elements{4, 8, 16, 32};  // L grid
    std::vector<int> bs_antennas{4};              // M grid (reduction grid only)
    std::vector<double> power_dbm{0, 10, 20, 30};
    std::vector<double> guardbands{0.1, 0.2};
    std::vector<Scheme> schemes{Scheme::kOptimal, Scheme::kRandomPhase, Scheme::kNoIrs};
    int trials = 100;
    int probes_per_trial = 128;  // probing rounds quantized together per trial
    int threads = 0;             // 0: one per hardware thread
    PilotConfig pilot;
    QuantizerSpec quantizer;
};

ExperimentPlan default_rate_plan();       // L in {4, 8, 16, 32}, 100 trials
ExperimentPlan default_reduction_plan();  // L in {8, 16, 32} x M in {2, 4, 8}, 50 trials
ExperimentPlan default_bdr_plan();        // P in {0, 10, 20, 30} dBm, 200 trials

// Throws ConfigError unless every grid is non-empty and strictly increasing,
// trials >= 1 and the scheme set is non-empty without repeats.
void validate_plan(const ExperimentPlan& plan);

// Scenario for one L: irs_rows x irs_cols = factor_irs_grid(L).
ScenarioConfig config_for_elements(const ScenarioConfig& base, int elements);

struct SampleStats {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single value
    int count = 0;
};

// NaN entries are skipped.
SampleStats summarize(const std::vector<double>& values);

struct RateRow {
    int L = 0;
    int X = 0;
    int Y = 0;
    Scheme scheme = Scheme::kOptimal;
    SampleStats rate;
    double mean_relaxed_bound = 0.0;  // NaN unless optimal
    int nonconverged = 0;
    std::vector<double> per_trial;
};

struct ReductionRow {
    int L = 0;
    int M = 0;
    SampleStats rate_with_eve;
    SampleStats rate_no_eve;
    SampleStats reduction_percent;  // statistics of the per-trial R_r
    int nonconverged = 0;
};

struct BdrRow {
    double power_dbm = 0.0;
    Scheme scheme = Scheme::kOptimal;
    double guardband = 0.0;
    SampleStats bdr;
    double mean_kept_fraction = 0.0;
    double mean_rate = 0.0;
    int empty_keys = 0;  // trials where no sample survived at both parties
    int nonconverged = 0;
};

std::vector<RateRow> run_rate_vs_L(const ExperimentPlan& plan);
std::vector<ReductionRow> run_reduction_grid(const ExperimentPlan& plan);

// Optional sink receiving (trial, P, scheme, delta, agreement) for key dumps.
using KeySink = std::function<void(int, double, Scheme, double, const KeyAgreement&)>;
std::vector<BdrRow> run_bdr_vs_power(const ExperimentPlan& plan, const KeySink& sink = {});

struct CsvOptions {
    bool timestamp = true;
    double wall_seconds = 0.0;
};

// Each file: an optional "# generated ..." line, one header line, data rows.
//   rate-vs-l:      L,X,Y,scheme,trials,mean_rate,std_rate,mean_relaxed_bound,nonconverged,seed,config_hash
//   reduction-grid: L,M,trials,mean_rate_eve,mean_rate_no_eve,mean_reduction_percent,std_reduction_percent,
//                   nonconverged,seed,config_hash
//   bdr-vs-power:   P_dbm,scheme,guardband,trials,mean_bdr,std_bdr,mean_kept_fraction,mean_rate,empty_keys,
//                   nonconverged,seed,config_hash
void write_rate_csv(std::ostream& out, const ExperimentPlan& plan, const std::vector<RateRow>& rows,
                    const CsvOptions& options);
void write_reduction_csv(std::ostream& out, const ExperimentPlan& plan, const std::vector<ReductionRow>& rows,
                         const CsvOptions& options);
void write_bdr_csv(std::ostream& out, const ExperimentPlan& plan, const std::vector<BdrRow>& rows,
                   const CsvOptions& options);

void write_rate_svg(std::ostream& out, const std::vector<RateRow>& rows);
void write_reduction_svg(std::ostream& out, const std::vector<ReductionRow>& rows);
void write_bdr_svg(std::ostream& out, const std::vector<BdrRow>& rows);

struct SingleRun {
    Scenario scenario;
    ChannelGains gains;
    PhaseOptimization optimal;
    double rate_random_phase = 0.0;
    double rate_no_eve_optimum = 0.0;  // I(H_A; H_B) at v = conj(beta)
    double reduction_percent = 0.0;
};

// One channel draw at the plan's scenario, optimized once.
SingleRun run_single(const ExperimentPlan& plan);

// quantity,value
void write_single_csv(std::ostream& out, const SingleRun& run, const CsvOptions& options);

struct OracleOptions {
    bool corrupt_constant = false;  // use sigma1^2 instead of sigma1^2 / P in the closed form
    int tuples = 1000;
    int grid_seeds = 20;
    int covariance_trials = 100000;
};

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct OracleReport {
    std::vector<OracleCheck> checks;
    bool passed() const;
};

OracleReport run_oracle_suite(const ExperimentPlan& plan, const OracleOptions& options);

// check,status,detail
void write_oracle_csv(std::ostream& out, const OracleReport& report, const CsvOptions& options);

// Derived-seed streams; one per random quantity so schemes and grid points
// share draws.
namespace streams {
inline constexpr std::uint64_t kGains = 1;
inline constexpr std::uint64_t kRandomPhase = 2;
inline constexpr std::uint64_t kOptimizer = 3;
inline constexpr std::uint64_t kProbes = 4;
inline constexpr std::uint64_t kOracle = 5;
}  // namespace streams

// Runs fn(0..count-1) on up to `threads` workers (0: hardware concurrency).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace irskg
