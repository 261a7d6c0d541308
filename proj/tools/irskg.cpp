// irskg: experiment runner for IRS-assisted secret key generation.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irskg/channel.hpp"
#include "irskg/config_io.hpp"
#include "irskg/errors.hpp"
#include "irskg/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitOracle = 2;
constexpr int kExitNonConvergence = 3;

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    std::string svg;
    std::string trace;
    std::string dump_keys;
    std::string dump_channel;
    bool no_timestamp = false;
    bool strict = false;
    int threads = 0;
    std::vector<int> L;
    std::vector<int> M;
    std::vector<double> P;
    std::vector<double> guardbands;
    std::vector<std::string> schemes;
    std::optional<int> probes;
    bool corrupt_constant = false;
    std::optional<int> tuples;
    std::optional<int> covariance_trials;
};

// Opens `path` for writing, or returns std::cout for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) {
                throw irskg::ConfigError("cannot open '" + path + "' for writing");
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

irskg::ExperimentPlan make_plan(irskg::ExperimentPlan plan, const Options& o) {
    if (!o.config_path.empty()) {
        plan.config = irskg::load_config(o.config_path);
    }
    for (const std::string& kv : o.overrides) {
        irskg::apply_override(plan.config, kv);
    }
    if (o.seed) {
        plan.config.seed = *o.seed;
    }
    if (o.trials) {
        plan.trials = *o.trials;
    }
    if (!o.L.empty()) {
        plan.irs_elements = o.L;
    }
    if (!o.M.empty()) {
        plan.bs_antennas = o.M;
    }
    if (!o.P.empty()) {
        plan.power_dbm = o.P;
    }
    if (!o.guardbands.empty()) {
        plan.guardbands = o.guardbands;
    }
    if (!o.schemes.empty()) {
        plan.schemes.clear();
        for (const std::string& s : o.schemes) {
            plan.schemes.push_back(irskg::parse_scheme(s));
        }
    }
    if (o.probes) {
        plan.probes_per_trial = *o.probes;
    }
    plan.threads = o.threads;
    irskg::validate_plan(plan);
    return plan;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_svg(const std::string& path, const std::function<void(std::ostream&)>& emit) {
    if (path.empty()) {
        return;
    }
    Output svg(path);
    emit(svg.stream());
}

int run(const std::string& command, const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    irskg::CsvOptions csv;
    csv.timestamp = !o.no_timestamp;

    if (command == "rate-vs-l") {
        const irskg::ExperimentPlan plan = make_plan(irskg::default_rate_plan(), o);
        const auto rows = irskg::run_rate_vs_L(plan);
        csv.wall_seconds = seconds_since(start);
        Output out(o.out);
        irskg::write_rate_csv(out.stream(), plan, rows, csv);
        write_svg(o.svg, [&](std::ostream& s) { irskg::write_rate_svg(s, rows); });
        int nonconverged = 0;
        for (const auto& r : rows) {
            nonconverged += r.nonconverged;
        }
        return o.strict && nonconverged > 0 ? kExitNonConvergence : kExitOk;
    }
    if (command == "reduction-grid") {
        const irskg::ExperimentPlan plan = make_plan(irskg::default_reduction_plan(), o);
        const auto rows = irskg::run_reduction_grid(plan);
        csv.wall_seconds = seconds_since(start);
        Output out(o.out);
        irskg::write_reduction_csv(out.stream(), plan, rows, csv);
        write_svg(o.svg, [&](std::ostream& s) { irskg::write_reduction_svg(s, rows); });
        int nonconverged = 0;
        for (const auto& r : rows) {
            nonconverged += r.nonconverged;
        }
        return o.strict && nonconverged > 0 ? kExitNonConvergence : kExitOk;
    }
    if (command == "bdr-vs-power") {
        const irskg::ExperimentPlan plan = make_plan(irskg::default_bdr_plan(), o);
        std::unique_ptr<Output> keys;
        irskg::KeySink sink;
        std::vector<std::string> lines;
        if (!o.dump_keys.empty()) {
            keys = std::make_unique<Output>(o.dump_keys);
            sink = [&](int trial, double P, irskg::Scheme s, double delta, const irskg::KeyAgreement& k) {
                char label[96];
                std::snprintf(label, sizeof label, "trial=%d P=%g scheme=%s delta=%g", trial, P,
                              irskg::scheme_name(s), delta);
                std::ostringstream line;
                irskg::write_key_line(line, std::string(label) + " party=A", k.bits_a);
                irskg::write_key_line(line, std::string(label) + " party=B", k.bits_b);
                lines.push_back(line.str());
            };
        }
        const auto rows = irskg::run_bdr_vs_power(plan, sink);
        csv.wall_seconds = seconds_since(start);
        Output out(o.out);
        irskg::write_bdr_csv(out.stream(), plan, rows, csv);
        write_svg(o.svg, [&](std::ostream& s) { irskg::write_bdr_svg(s, rows); });
        if (keys) {
            // Worker threads finish in any order; sort for a stable dump.
            std::sort(lines.begin(), lines.end());
            for (const std::string& l : lines) {
                keys->stream() << l;
            }
        }
        int nonconverged = 0;
        for (const auto& r : rows) {
            nonconverged += r.nonconverged;
        }
        return o.strict && nonconverged > 0 ? kExitNonConvergence : kExitOk;
    }
    if (command == "single-run") {
        const irskg::ExperimentPlan plan = make_plan(irskg::ExperimentPlan{}, o);
        const irskg::SingleRun result = irskg::run_single(plan);
        csv.wall_seconds = seconds_since(start);
        Output out(o.out);
        irskg::write_single_csv(out.stream(), result, csv);
        if (!o.trace.empty()) {
            Output trace(o.trace);
            irskg::write_trace_csv(trace.stream(), result.optimal.trace);
        }
        if (!o.dump_channel.empty()) {
            irskg::Rng rng(irskg::derive_seed(plan.config.seed, irskg::streams::kGains, 0));
            const irskg::ChannelGains gains = irskg::sample_gains(result.scenario, rng);
            irskg::Rng links(irskg::derive_seed(plan.config.seed, irskg::streams::kProbes, 0));
            Output dump(o.dump_channel);
            irskg::write_realization_csv(dump.stream(),
                                         irskg::realization_with_gains(result.scenario, gains, links));
        }
        return o.strict && !result.optimal.trace.converged ? kExitNonConvergence : kExitOk;
    }
    if (command == "oracle-suite") {
        const irskg::ExperimentPlan plan = make_plan(irskg::ExperimentPlan{}, o);
        irskg::OracleOptions opts;
        opts.corrupt_constant = o.corrupt_constant;
        if (o.tuples) {
            opts.tuples = *o.tuples;
        }
        if (o.covariance_trials) {
            opts.covariance_trials = *o.covariance_trials;
        }
        if (o.trials) {
            opts.grid_seeds = *o.trials;
        }
        const irskg::OracleReport report = irskg::run_oracle_suite(plan, opts);
        csv.wall_seconds = seconds_since(start);
        Output out(o.out);
        irskg::write_oracle_csv(out.stream(), report, csv);
        return report.passed() ? kExitOk : kExitOracle;
    }
    if (command == "dump-channel") {
        const irskg::ExperimentPlan plan = make_plan(irskg::ExperimentPlan{}, o);
        const irskg::Scenario sc = irskg::resolve(plan.config);
        irskg::Rng rng(irskg::derive_seed(plan.config.seed, irskg::streams::kGains, 0));
        const irskg::ChannelGains gains = irskg::sample_gains(sc, rng);
        irskg::Rng links(irskg::derive_seed(plan.config.seed, irskg::streams::kProbes, 0));
        Output out(o.out);
        irskg::write_realization_csv(out.stream(), irskg::realization_with_gains(sc, gains, links));
        return kExitOk;
    }
    throw irskg::ConfigError("unknown subcommand " + command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS-assisted physical-layer key generation experiments"};
    app.require_subcommand(1, 1);
    Options o;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"rate-vs-l", "secret key rate versus number of IRS elements"},
        {"reduction-grid", "key rate reduction caused by Eve's correlation over an L x M grid"},
        {"bdr-vs-power", "bit disagreement ratio versus transmit power"},
        {"single-run", "optimize one channel draw and report every rate"},
        {"oracle-suite", "run the built-in consistency checks"},
        {"dump-channel", "write one seeded channel realization as CSV"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config_path, "key = value scenario file");
        sub->add_option("--set", o.overrides, "override one key, e.g. --set bs_antennas=8")->take_all();
        sub->add_option("--seed", o.seed, "base seed");
        sub->add_option("--out", o.out, "output CSV path (default stdout)");
        sub->add_flag("--no-timestamp", o.no_timestamp, "omit the '# generated' line");
        sub->add_option("--threads", o.threads, "worker threads (0: all cores)");
        if (name == "rate-vs-l" || name == "reduction-grid" || name == "bdr-vs-power" || name == "oracle-suite") {
            sub->add_option("--trials", o.trials, name == "oracle-suite" ? "grid-oracle seeds" : "trials per point");
        }
        if (name == "rate-vs-l" || name == "reduction-grid" || name == "bdr-vs-power") {
            sub->add_option("--svg", o.svg, "also write an SVG line chart");
            sub->add_flag("--strict", o.strict, "exit 3 if any optimization did not converge");
            sub->add_option("--schemes", o.schemes, "subset of optimal,random-phase,no-irs")->delimiter(',');
        }
        if (name == "rate-vs-l" || name == "reduction-grid") {
            sub->add_option("--L", o.L, "IRS element grid, e.g. 4,8,16,32")->delimiter(',');
        }
        if (name == "reduction-grid") {
            sub->add_option("--M", o.M, "BS antenna grid, e.g. 2,4,8")->delimiter(',');
        }
        if (name == "bdr-vs-power") {
            sub->add_option("--P", o.P, "transmit power grid in dBm")->delimiter(',');
            sub->add_option("--guardbands", o.guardbands, "guardband grid, e.g. 0.1,0.2")->delimiter(',');
            sub->add_option("--probes", o.probes, "probing rounds quantized together per trial");
            sub->add_option("--dump-keys", o.dump_keys, "write reconciled keys as hex lines");
        }
        if (name == "single-run") {
            sub->add_option("--trace", o.trace, "optimizer iteration CSV");
            sub->add_option("--dump-channel", o.dump_channel, "also write the channel realization");
            sub->add_flag("--strict", o.strict, "exit 3 if the optimizer did not converge");
        }
        if (name == "oracle-suite") {
            sub->add_flag("--corrupt-constant", o.corrupt_constant,
                          "fault injection: use sigma1^2 instead of sigma1^2/P in the closed form");
            sub->add_option("--tuples", o.tuples, "random parameter tuples for the closed-form check");
            sub->add_option("--covariance-trials", o.covariance_trials, "Monte-Carlo trials for covariances");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const irskg::ConfigError& e) {
        std::cerr << "irskg: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "irskg: " << e.what() << '\n';
        return kExitUsage;
    }
}
