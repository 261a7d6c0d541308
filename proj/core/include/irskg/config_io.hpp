#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "irskg/scenario.hpp"

namespace irskg {

// Line-oriented key=value scenario files. Blank lines and lines starting with '#'
// are ignored; whitespace around keys and values is trimmed. Unknown keys are
// errors. The schema (all keys optional, defaults from ScenarioConfig):
//
//   bs_pos, ut_pos, eve_pos, irs_pos   x,y,z in metres
//   pl0_db                            path loss at 1 m, dB
//   c_ab, c_ae, c_be, c_q, c_gu, c_ge path-loss exponents
//   tx_power_dbm, noise1_dbm, noise2_dbm
//   bs_antennas                       M
//   irs_rows, irs_cols                X, Y
//   irs_elements                      L; sets irs_rows/irs_cols via factor_irs_grid
//   spacing_ratio                     d / lambda
//   seed                              unsigned 64-bit
//   phi_bs, theta_irs, gamma_irs, phi_irs_ut, omega_irs_ut, phi_irs_eve,
//   omega_irs_eve                     radians, or "auto" to derive from geometry
//   solver.method                     factored or projected
//   solver.inner_tol, solver.outer_tol, solver.inner_cap, solver.outer_cap,
//   solver.subproblem_cap, solver.subproblem_tol, solver.projection_tol,
//   solver.projection_cap, solver.randomization_trials
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

// Applies one "key=value" assignment, as given to --set.
void apply_override(ScenarioConfig& config, std::string_view assignment);

ScenarioConfig parse_config(std::istream& in, std::string_view source = "<stream>");
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

// FNV-1a over the canonical text.
std::uint64_t config_hash(const ScenarioConfig& config);
std::string config_hash_hex(const ScenarioConfig& config);

std::vector<std::string> config_keys();

}  // namespace irskg
