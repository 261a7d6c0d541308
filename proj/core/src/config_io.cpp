#include "irskg/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <cmath>
#include <sstream>

#include "irskg/errors.hpp"

namespace irskg {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string text(trim(value));
    if (text.empty()) {
        bad_value(key, value);
    }
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(text, &used);
    } catch (const std::exception&) {
        bad_value(key, value);
    }
    if (used != text.size() || !std::isfinite(out)) {
        bad_value(key, value);
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
    const std::string_view text = trim(value);
    Int out{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        bad_value(key, value);
    }
    return out;
}

Vec3 parse_vec3(std::string_view key, std::string_view value) {
    Vec3 out{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto comma = value.find(',', start);
        const bool last = (i == 2);
        if (last != (comma == std::string_view::npos)) {
            bad_value(key, value);
        }
        out[i] = parse_double(key, value.substr(start, last ? std::string_view::npos : comma - start));
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_angle(std::string_view key, std::string_view value) {
    if (trim(value) == "auto") {
        return std::nullopt;
    }
    return parse_double(key, value);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
    Setter set;
    Getter get;  // empty for write-only convenience keys
};

template <typename Member>
Field real_field(Member member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.*member = parse_double(k, v); },
            [member](const ScenarioConfig& c) { return fmt(c.*member); }};
}

template <typename Member>
Field int_field(Member member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.*member = parse_int<int>(k, v); },
            [member](const ScenarioConfig& c) { return std::to_string(c.*member); }};
}

template <typename Member>
Field vec_field(Member member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.*member = parse_vec3(k, v); },
            [member](const ScenarioConfig& c) {
                const Vec3& p = c.*member;
                return fmt(p[0]) + "," + fmt(p[1]) + "," + fmt(p[2]);
            }};
}

template <typename Member>
Field angle_field(Member member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.angles.*member = parse_angle(k, v); },
            [member](const ScenarioConfig& c) {
                const auto& a = c.angles.*member;
                return a ? fmt(*a) : std::string("auto");
            }};
}

template <typename Member>
Field solver_real(Member member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.solver.*member = parse_double(k, v); },
            [member](const ScenarioConfig& c) { return fmt(c.solver.*member); }};
}

template <typename Member>
Field solver_int(Member member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.solver.*member = parse_int<int>(k, v); },
            [member](const ScenarioConfig& c) { return std::to_string(c.solver.*member); }};
}

// Ordered; serialize_config emits keys in this order.
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        t.emplace_back("bs_pos", vec_field(&ScenarioConfig::bs_pos));
        t.emplace_back("ut_pos", vec_field(&ScenarioConfig::ut_pos));
        t.emplace_back("eve_pos", vec_field(&ScenarioConfig::eve_pos));
        t.emplace_back("irs_pos", vec_field(&ScenarioConfig::irs_pos));
        t.emplace_back("pl0_db", real_field(&ScenarioConfig::pl0_db));
        t.emplace_back("c_ab", real_field(&ScenarioConfig::c_ab));
        t.emplace_back("c_ae", real_field(&ScenarioConfig::c_ae));
        t.emplace_back("c_be", real_field(&ScenarioConfig::c_be));
        t.emplace_back("c_q", real_field(&ScenarioConfig::c_q));
        t.emplace_back("c_gu", real_field(&ScenarioConfig::c_gu));
        t.emplace_back("c_ge", real_field(&ScenarioConfig::c_ge));
        t.emplace_back("tx_power_dbm", real_field(&ScenarioConfig::tx_power_dbm));
        t.emplace_back("noise1_dbm", real_field(&ScenarioConfig::noise1_dbm));
        t.emplace_back("noise2_dbm", real_field(&ScenarioConfig::noise2_dbm));
        t.emplace_back("bs_antennas", int_field(&ScenarioConfig::bs_antennas));
        t.emplace_back("irs_rows", int_field(&ScenarioConfig::irs_rows));
        t.emplace_back("irs_cols", int_field(&ScenarioConfig::irs_cols));
        t.emplace_back("irs_elements",
                       Field{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                 const auto grid = factor_irs_grid(parse_int<int>(k, v));
                                 c.irs_rows = grid[0];
                                 c.irs_cols = grid[1];
                             },
                             {}});
        t.emplace_back("spacing_ratio", real_field(&ScenarioConfig::spacing_ratio));
        t.emplace_back("seed", Field{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                         c.seed = parse_int<std::uint64_t>(k, v);
                                     },
                                     [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
        t.emplace_back("phi_bs", angle_field(&AngleOverrides::phi_bs));
        t.emplace_back("theta_irs", angle_field(&AngleOverrides::theta_irs));
        t.emplace_back("gamma_irs", angle_field(&AngleOverrides::gamma_irs));
        t.emplace_back("phi_irs_ut", angle_field(&AngleOverrides::phi_irs_ut));
        t.emplace_back("omega_irs_ut", angle_field(&AngleOverrides::omega_irs_ut));
        t.emplace_back("phi_irs_eve", angle_field(&AngleOverrides::phi_irs_eve));
        t.emplace_back("omega_irs_eve", angle_field(&AngleOverrides::omega_irs_eve));
        t.emplace_back("solver.method",
                       Field{[](ScenarioConfig& c, std::string_view k, std::string_view v) {
                                 if (v == "factored") {
                                     c.solver.method = SubproblemMethod::kFactored;
                                 } else if (v == "projected") {
                                     c.solver.method = SubproblemMethod::kProjected;
                                 } else {
                                     throw ConfigError(std::string(k) + ": expected factored or projected, got '" +
                                                       std::string(v) + "'");
                                 }
                             },
                             [](const ScenarioConfig& c) {
                                 return std::string(c.solver.method == SubproblemMethod::kFactored ? "factored"
                                                                                                   : "projected");
                             }});
        t.emplace_back("solver.inner_tol", solver_real(&SolverSettings::inner_tol));
        t.emplace_back("solver.outer_tol", solver_real(&SolverSettings::outer_tol));
        t.emplace_back("solver.inner_cap", solver_int(&SolverSettings::inner_cap));
        t.emplace_back("solver.outer_cap", solver_int(&SolverSettings::outer_cap));
        t.emplace_back("solver.subproblem_cap", solver_int(&SolverSettings::subproblem_cap));
        t.emplace_back("solver.subproblem_tol", solver_real(&SolverSettings::subproblem_tol));
        t.emplace_back("solver.projection_tol", solver_real(&SolverSettings::projection_tol));
        t.emplace_back("solver.projection_cap", solver_int(&SolverSettings::projection_cap));
        t.emplace_back("solver.randomization_trials", solver_int(&SolverSettings::randomization_trials));
        return t;
    }();
    return table;
}

const Field* find_field(std::string_view key) {
    for (const auto& [name, field] : fields()) {
        if (name == key) {
            return &field;
        }
    }
    return nullptr;
}

}  // namespace

void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value) {
    const std::string_view k = trim(key);
    const Field* field = find_field(k);
    if (field == nullptr) {
        throw ConfigError("unknown config key '" + std::string(k) + "'");
    }
    field->set(config, k, trim(value));
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    }
    apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ScenarioConfig parse_config(std::istream& in, std::string_view source) {
    ScenarioConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        try {
            apply_override(config, text);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    return parse_config(in, path.string());
}

std::string serialize_config(const ScenarioConfig& config) {
    std::ostringstream out;
    for (const auto& [name, field] : fields()) {
        if (field.get) {
            out << name << '=' << field.get(config) << '\n';
        }
    }
    return out.str();
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : serialize_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash_hex(const ScenarioConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    return buf;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [name, field] : fields()) {
        keys.push_back(name);
    }
    return keys;
}

}  // namespace irskg
