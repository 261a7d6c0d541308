#include "irskg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "irskg/config_io.hpp"
#include "irskg/errors.hpp"
#include "irskg/lifted.hpp"
#include "irskg/svg.hpp"

namespace irskg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

template <typename T>
void check_increasing(const std::vector<T>& grid, const char* name) {
    if (grid.empty()) {
        throw ConfigError(std::string(name) + " grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i - 1] < grid[i])) {
            throw ConfigError(std::string(name) + " grid must be strictly increasing");
        }
    }
}

void write_preamble(std::ostream& out, const CsvOptions& options) {
    if (!options.timestamp) {
        return;
    }
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << stamp << " wall_seconds=" << fmt(options.wall_seconds) << '\n';
}

ChannelGains trial_gains(const Scenario& sc, std::uint64_t seed, int trial) {
    Rng rng(derive_seed(seed, streams::kGains, static_cast<std::uint64_t>(trial)));
    return sample_gains(sc, rng);
}

double no_irs_rate(const Scenario& sc, const GeometryVectors& geo, const ChannelGains& gains) {
    return rate_no_irs(effective_stats(CVector::Ones(sc.L), geo, gains, sc));
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::kOptimal: return "optimal";
        case Scheme::kRandomPhase: return "random-phase";
        case Scheme::kNoIrs: return "no-irs";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "optimal") {
        return Scheme::kOptimal;
    }
    if (name == "random-phase") {
        return Scheme::kRandomPhase;
    }
    if (name == "no-irs") {
        return Scheme::kNoIrs;
    }
    throw ConfigError("unknown scheme '" + std::string(name) + "' (expected optimal, random-phase or no-irs)");
}

ExperimentPlan default_rate_plan() { return ExperimentPlan{}; }

ExperimentPlan default_reduction_plan() {
    ExperimentPlan p;
    p.irs_elements = {8, 16, 32};
    p.bs_antennas = {2, 4, 8};
    p.trials = 50;
    p.schemes = {Scheme::kOptimal};
    return p;
}

ExperimentPlan default_bdr_plan() {
    ExperimentPlan p;
    p.trials = 200;
    return p;
}

void validate_plan(const ExperimentPlan& plan) {
    check_increasing(plan.irs_elements, "L");
    check_increasing(plan.bs_antennas, "M");
    check_increasing(plan.power_dbm, "P");
    check_increasing(plan.guardbands, "guardband");
    if (plan.irs_elements.front() < 1) {
        throw ConfigError("L grid entries must be >= 1");
    }
    if (plan.bs_antennas.front() < 1) {
        throw ConfigError("M grid entries must be >= 1");
    }
    if (plan.trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (plan.probes_per_trial < 2) {
        throw ConfigError("probes per trial must be >= 2");
    }
    if (plan.schemes.empty()) {
        throw ConfigError("scheme set is empty");
    }
    std::set<Scheme> seen(plan.schemes.begin(), plan.schemes.end());
    if (seen.size() != plan.schemes.size()) {
        throw ConfigError("scheme set has repeats");
    }
    for (double d : plan.guardbands) {
        if (!(d >= 0.0 && d < 1.0)) {
            throw ConfigError("guardband must be in [0, 1)");
        }
    }
}

ScenarioConfig config_for_elements(const ScenarioConfig& base, int elements) {
    if (elements < 1) {
        throw ConfigError("L must be >= 1, got " + std::to_string(elements));
    }
    ScenarioConfig c = base;
    const auto grid = factor_irs_grid(elements);
    c.irs_rows = grid[0];
    c.irs_cols = grid[1];
    return c;
}

SampleStats summarize(const std::vector<double>& values) {
    SampleStats s;
    double sum = 0.0;
    for (double v : values) {
        if (!std::isnan(v)) {
            sum += v;
            ++s.count;
        }
    }
    if (s.count == 0) {
        s.mean = kNaN;
        s.std = kNaN;
        return s;
    }
    s.mean = sum / s.count;
    double ss = 0.0;
    for (double v : values) {
        if (!std::isnan(v)) {
            ss += (v - s.mean) * (v - s.mean);
        }
    }
    s.std = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
    return s;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(error_lock);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::vector<RateRow> run_rate_vs_L(const ExperimentPlan& plan) {
    validate_plan(plan);
    const std::uint64_t seed = plan.config.seed;
    std::vector<RateRow> rows;
    for (int L : plan.irs_elements) {
        const Scenario sc = resolve(config_for_elements(plan.config, L));
        const GeometryVectors geo = geometry_vectors(sc);
        const int n = plan.trials;
        std::vector<double> opt(n, kNaN), bound(n, kNaN), rnd(n, kNaN), none(n, kNaN);
        std::vector<char> converged(n, 1);
        const auto has = [&](Scheme s) {
            return std::find(plan.schemes.begin(), plan.schemes.end(), s) != plan.schemes.end();
        };
        const bool want_opt = has(Scheme::kOptimal);
        const bool want_rnd = has(Scheme::kRandomPhase);
        parallel_for(n, plan.threads, [&](int t) {
            const ChannelGains gains = trial_gains(sc, seed, t);
            none[t] = no_irs_rate(sc, geo, gains);
            if (want_rnd) {
                Rng rng(derive_seed(seed, streams::kRandomPhase, static_cast<std::uint64_t>(t)));
                const CVector v = random_phase_baseline(sc.L, rng);
                rnd[t] = rate_closed(effective_stats(v, geo, gains, sc));
            }
            if (want_opt) {
                Rng rng(derive_seed(seed, streams::kOptimizer, static_cast<std::uint64_t>(t)));
                const PhaseOptimization p = optimize_phases(sc, geo, gains, rng);
                opt[t] = p.report.rate_closed;
                bound[t] = p.report.relaxed_bound.value_or(kNaN);
                converged[t] = p.trace.converged ? 1 : 0;
            }
        });
        for (Scheme s : plan.schemes) {
            RateRow row;
            row.L = L;
            row.X = sc.X;
            row.Y = sc.Y;
            row.scheme = s;
            row.mean_relaxed_bound = kNaN;
            if (s == Scheme::kOptimal) {
                row.per_trial = opt;
                row.mean_relaxed_bound = summarize(bound).mean;
                row.nonconverged = static_cast<int>(std::count(converged.begin(), converged.end(), 0));
            } else if (s == Scheme::kRandomPhase) {
                row.per_trial = rnd;
            } else {
                row.per_trial = none;
            }
            row.rate = summarize(row.per_trial);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<ReductionRow> run_reduction_grid(const ExperimentPlan& plan) {
    validate_plan(plan);
    const std::uint64_t seed = plan.config.seed;
    std::vector<ReductionRow> rows;
    for (int L : plan.irs_elements) {
        for (int M : plan.bs_antennas) {
            ScenarioConfig cfg = config_for_elements(plan.config, L);
            cfg.bs_antennas = M;
            const Scenario sc = resolve(cfg);
            const GeometryVectors geo = geometry_vectors(sc);
            const CVector v_no_eve = optimize_no_eve(geo);
            const int n = plan.trials;
            std::vector<double> with(n, kNaN), without(n, kNaN), reduction(n, kNaN);
            std::vector<char> converged(n, 1);
            parallel_for(n, plan.threads, [&](int t) {
                const ChannelGains gains = trial_gains(sc, seed, t);
                Rng rng(derive_seed(seed, streams::kOptimizer, static_cast<std::uint64_t>(t)));
                const PhaseOptimization p = optimize_phases(sc, geo, gains, rng);
                converged[t] = p.trace.converged ? 1 : 0;
                with[t] = p.report.rate_closed;
                without[t] = rate_no_eve_closed(effective_stats(v_no_eve, geo, gains, sc));
                reduction[t] = rate_reduction(with[t], without[t]);
            });
            ReductionRow row;
            row.L = L;
            row.M = M;
            row.rate_with_eve = summarize(with);
            row.rate_no_eve = summarize(without);
            row.reduction_percent = summarize(reduction);
            row.nonconverged = static_cast<int>(std::count(converged.begin(), converged.end(), 0));
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<BdrRow> run_bdr_vs_power(const ExperimentPlan& plan, const KeySink& sink) {
    validate_plan(plan);
    const std::uint64_t seed = plan.config.seed;
    const std::size_t S = plan.schemes.size();
    const std::size_t D = plan.guardbands.size();
    std::vector<BdrRow> rows;
    std::mutex sink_lock;
    for (double P : plan.power_dbm) {
        ScenarioConfig cfg = plan.config;
        cfg.tx_power_dbm = P;
        const Scenario sc = resolve(cfg);
        const GeometryVectors geo = geometry_vectors(sc);
        const int n = plan.trials;
        // [scheme][delta][trial]
        std::vector<std::vector<std::vector<double>>> bdrs(S, std::vector<std::vector<double>>(D, std::vector<double>(n, kNaN)));
        std::vector<std::vector<std::vector<double>>> kept(S, std::vector<std::vector<double>>(D, std::vector<double>(n, kNaN)));
        std::vector<std::vector<double>> rates(S, std::vector<double>(n, kNaN));
        std::vector<std::vector<char>> converged(S, std::vector<char>(n, 1));
        parallel_for(n, plan.threads, [&](int t) {
            const ChannelGains gains = trial_gains(sc, seed, t);
            for (std::size_t s = 0; s < S; ++s) {
                CVector v = CVector::Ones(sc.L);
                ChannelGains used = gains;
                switch (plan.schemes[s]) {
                    case Scheme::kOptimal: {
                        Rng rng(derive_seed(seed, streams::kOptimizer, static_cast<std::uint64_t>(t)));
                        const PhaseOptimization p = optimize_phases(sc, geo, gains, rng);
                        v = p.v;
                        rates[s][t] = p.report.rate_closed;
                        converged[s][t] = p.trace.converged ? 1 : 0;
                        break;
                    }
                    case Scheme::kRandomPhase: {
                        Rng rng(derive_seed(seed, streams::kRandomPhase, static_cast<std::uint64_t>(t)));
                        v = random_phase_baseline(sc.L, rng);
                        rates[s][t] = rate_closed(effective_stats(v, geo, gains, sc));
                        break;
                    }
                    case Scheme::kNoIrs:
                        used = ChannelGains{};
                        rates[s][t] = no_irs_rate(sc, geo, gains);
                        break;
                }
                const auto probes = simulate_probes(sc, used, v, plan.pilot, plan.probes_per_trial,
                                                    derive_seed(seed, streams::kProbes, static_cast<std::uint64_t>(t)));
                std::vector<CVector> a, b;
                a.reserve(probes.size());
                b.reserve(probes.size());
                for (const ObservationTriple& o : probes) {
                    a.push_back(o.H_A);
                    b.push_back(o.H_B);
                }
                for (std::size_t d = 0; d < D; ++d) {
                    QuantizerSpec q = plan.quantizer;
                    q.guardband = plan.guardbands[d];
                    const KeyAgreement k = agree_keys(a, b, q);
                    bdrs[s][d][t] = k.bdr;
                    kept[s][d][t] = k.kept_fraction;
                    if (sink) {
                        std::lock_guard<std::mutex> g(sink_lock);
                        sink(t, P, plan.schemes[s], q.guardband, k);
                    }
                }
            }
        });
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t d = 0; d < D; ++d) {
                BdrRow row;
                row.power_dbm = P;
                row.scheme = plan.schemes[s];
                row.guardband = plan.guardbands[d];
                row.bdr = summarize(bdrs[s][d]);
                row.mean_kept_fraction = summarize(kept[s][d]).mean;
                row.mean_rate = summarize(rates[s]).mean;
                row.empty_keys = static_cast<int>(
                    std::count_if(bdrs[s][d].begin(), bdrs[s][d].end(), [](double x) { return std::isnan(x); }));
                row.nonconverged = static_cast<int>(std::count(converged[s].begin(), converged[s].end(), 0));
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_rate_csv(std::ostream& out, const ExperimentPlan& plan, const std::vector<RateRow>& rows,
                    const CsvOptions& options) {
    write_preamble(out, options);
    const std::string hash = config_hash_hex(plan.config);
    out << "L,X,Y,scheme,trials,mean_rate,std_rate,mean_relaxed_bound,nonconverged,seed,config_hash\n";
    for (const RateRow& r : rows) {
        out << r.L << ',' << r.X << ',' << r.Y << ',' << scheme_name(r.scheme) << ',' << r.rate.count << ','
            << fmt(r.rate.mean) << ',' << fmt(r.rate.std) << ',' << fmt(r.mean_relaxed_bound) << ','
            << r.nonconverged << ',' << plan.config.seed << ',' << hash << '\n';
    }
}

void write_reduction_csv(std::ostream& out, const ExperimentPlan& plan, const std::vector<ReductionRow>& rows,
                         const CsvOptions& options) {
    write_preamble(out, options);
    const std::string hash = config_hash_hex(plan.config);
    out << "L,M,trials,mean_rate_eve,mean_rate_no_eve,mean_reduction_percent,std_reduction_percent,"
           "nonconverged,seed,config_hash\n";
    for (const ReductionRow& r : rows) {
        out << r.L << ',' << r.M << ',' << r.reduction_percent.count << ',' << fmt(r.rate_with_eve.mean) << ','
            << fmt(r.rate_no_eve.mean) << ',' << fmt(r.reduction_percent.mean) << ','
            << fmt(r.reduction_percent.std) << ',' << r.nonconverged << ',' << plan.config.seed << ',' << hash
            << '\n';
    }
}

void write_bdr_csv(std::ostream& out, const ExperimentPlan& plan, const std::vector<BdrRow>& rows,
                   const CsvOptions& options) {
    write_preamble(out, options);
    const std::string hash = config_hash_hex(plan.config);
    out << "P_dbm,scheme,guardband,trials,mean_bdr,std_bdr,mean_kept_fraction,mean_rate,empty_keys,"
           "nonconverged,seed,config_hash\n";
    for (const BdrRow& r : rows) {
        out << fmt(r.power_dbm) << ',' << scheme_name(r.scheme) << ',' << fmt(r.guardband) << ',' << r.bdr.count
            << ',' << fmt(r.bdr.mean) << ',' << fmt(r.bdr.std) << ',' << fmt(r.mean_kept_fraction) << ','
            << fmt(r.mean_rate) << ',' << r.empty_keys << ',' << r.nonconverged << ',' << plan.config.seed << ','
            << hash << '\n';
    }
}

void write_rate_svg(std::ostream& out, const std::vector<RateRow>& rows) {
    std::vector<Series> series;
    for (const RateRow& r : rows) {
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& s) { return s.name == scheme_name(r.scheme); });
        if (it == series.end()) {
            series.push_back({scheme_name(r.scheme), {}, {}});
            it = series.end() - 1;
        }
        it->x.push_back(r.L);
        it->y.push_back(r.rate.mean);
    }
    write_line_chart(out, {"Secret key rate vs IRS elements", "L", "rate (bits per probe)"}, series);
}

void write_reduction_svg(std::ostream& out, const std::vector<ReductionRow>& rows) {
    std::vector<Series> series;
    for (const ReductionRow& r : rows) {
        const std::string name = "M=" + std::to_string(r.M);
        auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.name == name; });
        if (it == series.end()) {
            series.push_back({name, {}, {}});
            it = series.end() - 1;
        }
        it->x.push_back(r.L);
        it->y.push_back(r.reduction_percent.mean);
    }
    write_line_chart(out, {"Key rate reduction from Eve's correlation", "L", "R_r (%)"}, series);
}

void write_bdr_svg(std::ostream& out, const std::vector<BdrRow>& rows) {
    std::vector<Series> series;
    for (const BdrRow& r : rows) {
        const std::string name = std::string(scheme_name(r.scheme)) + " d=" + fmt(r.guardband);
        auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.name == name; });
        if (it == series.end()) {
            series.push_back({name, {}, {}});
            it = series.end() - 1;
        }
        it->x.push_back(r.power_dbm);
        it->y.push_back(r.bdr.mean);
    }
    write_line_chart(out, {"Bit disagreement ratio vs transmit power", "P (dBm)", "BDR"}, series);
}

SingleRun run_single(const ExperimentPlan& plan) {
    SingleRun run;
    run.scenario = resolve(plan.config);
    const Scenario& sc = run.scenario;
    const GeometryVectors geo = geometry_vectors(sc);
    const std::uint64_t seed = plan.config.seed;
    run.gains = trial_gains(sc, seed, 0);
    Rng rng(derive_seed(seed, streams::kOptimizer, 0));
    run.optimal = optimize_phases(sc, geo, run.gains, rng);
    Rng rrng(derive_seed(seed, streams::kRandomPhase, 0));
    run.rate_random_phase = rate_closed(effective_stats(random_phase_baseline(sc.L, rrng), geo, run.gains, sc));
    run.rate_no_eve_optimum = rate_no_eve_closed(effective_stats(optimize_no_eve(geo), geo, run.gains, sc));
    run.reduction_percent = rate_reduction(run.optimal.report.rate_closed, run.rate_no_eve_optimum);
    run.optimal.report.reduction_percent = run.reduction_percent;
    return run;
}

void write_single_csv(std::ostream& out, const SingleRun& run, const CsvOptions& options) {
    write_preamble(out, options);
    const KeyRateReport& r = run.optimal.report;
    const OptimizerTrace& t = run.optimal.trace;
    out << "quantity,value\n";
    out << "config_hash," << config_hash_hex(run.scenario.config) << '\n';
    out << "seed," << run.scenario.config.seed << '\n';
    out << "L," << run.scenario.L << '\n';
    out << "M," << run.scenario.M << '\n';
    out << "rate_closed," << fmt(r.rate_closed) << '\n';
    out << "rate_direct," << fmt(r.rate_direct) << '\n';
    out << "relaxed_bound," << fmt(r.relaxed_bound.value_or(kNaN)) << '\n';
    out << "rate_random_phase," << fmt(run.rate_random_phase) << '\n';
    out << "rate_no_irs," << fmt(r.rate_no_irs) << '\n';
    out << "rate_no_eve_at_v," << fmt(r.rate_no_eve) << '\n';
    out << "rate_no_eve_optimum," << fmt(run.rate_no_eve_optimum) << '\n';
    out << "reduction_percent," << fmt(run.reduction_percent) << '\n';
    out << "outer_iterations," << t.outer_iterations << '\n';
    out << "inner_iterations," << t.inner_iterations << '\n';
    out << "converged," << (t.converged ? 1 : 0) << '\n';
    out << "final_gap," << fmt(t.final_gap) << '\n';
    out << "randomization_candidates," << t.randomization_trials << '\n';
    out << "best_candidate," << t.best_trial << '\n';
    out << "refinement_rounds," << t.refinement_rounds << '\n';
    out << "diag_residual," << fmt(t.residuals.diag_residual) << '\n';
    out << "psd_residual," << fmt(t.residuals.psd_residual) << '\n';
    for (Eigen::Index n = 0; n < run.optimal.v.size(); ++n) {
        out << "phase_" << n << ',' << fmt(std::arg(run.optimal.v[n])) << '\n';
    }
}

bool OracleReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

void write_oracle_csv(std::ostream& out, const OracleReport& report, const CsvOptions& options) {
    write_preamble(out, options);
    out << "check,status,detail\n";
    for (const OracleCheck& c : report.checks) {
        out << c.name << ',' << (c.passed ? "pass" : "FAIL") << ',' << c.detail << '\n';
    }
}

}  // namespace irskg
