#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace irskg {

using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

// Angle convention
// ----------------
// All angles are in radians.
//
// IRS: the UPA lies in the horizontal plane through the IRS centre. Element (x, y)
// (0-based, row-major, n = x * Y + y) sits at (x * d, y * d, 0) in the global frame,
// so the x-index runs along global +x and the y-index along global +y; the array
// normal is global +z. For a unit direction u pointing away from the IRS,
//
//     gamma = acos(u_y)          in [0, pi]   (angle to the y-index axis)
//     theta = atan2(u_x, u_z)    in [0, pi]   (angle about the y-index axis, from +z)
//
// which gives sin(theta) sin(gamma) = u_x and cos(gamma) = u_y, i.e. the phase
// function tau_{x,y}(theta, gamma) = -j 2 pi (d / lambda) (x sin(theta) sin(gamma) + y cos(gamma))
// is the plane-wave phase of element (x, y). Directions with u_x < 0 are not
// representable with theta in [0, pi] and are rejected. When sin(gamma) = 0 the
// value of theta does not matter and theta = 0 is returned.
//
// BS: the ULA lies along global +x. phi_bs is the azimuth of the BS->IRS direction
// in the horizontal plane, measured from +y towards +x and wrapped into [0, 2 pi);
// sin(phi_bs) is the projection of the horizontal direction onto the array axis.
//
// The IRS arrival pair (theta_irs, gamma_irs) is the direction from the IRS towards
// the BS; the departure pairs (phi_irs_ut, omega_irs_ut) and (phi_irs_eve,
// omega_irs_eve) are the directions from the IRS towards the UT and Eve.
struct AngleSet {
    double phi_bs = 0.0;
    double theta_irs = 0.0;
    double gamma_irs = 0.0;
    double phi_irs_ut = 0.0;
    double omega_irs_ut = 0.0;
    double phi_irs_eve = 0.0;
    double omega_irs_eve = 0.0;

    bool operator==(const AngleSet&) const = default;
};

struct AngleOverrides {
    std::optional<double> phi_bs;
    std::optional<double> theta_irs;
    std::optional<double> gamma_irs;
    std::optional<double> phi_irs_ut;
    std::optional<double> omega_irs_ut;
    std::optional<double> phi_irs_eve;
    std::optional<double> omega_irs_eve;

    bool operator==(const AngleOverrides&) const = default;
};

// How each convex subproblem is solved over the elliptope. kProjected runs
// projected gradient with Dykstra projections; kFactored runs the same ascent on
// V = U U^H with unit-norm rows of U (L x L), where the projection is row
// normalization.
enum class SubproblemMethod { kFactored, kProjected };

// Iteration controls for the phase-shift optimizer.
struct SolverSettings {
    SubproblemMethod method = SubproblemMethod::kFactored;
    double inner_tol = 1e-7;      // SCA: relative surrogate improvement
    double outer_tol = 1e-6;      // Dinkelbach: |f/g - mu|
    int inner_cap = 200;          // SCA re-anchorings per mu
    int outer_cap = 50;           // mu updates
    int subproblem_cap = 200;     // projected-gradient steps per convex subproblem
    double subproblem_tol = 1e-9; // relative ascent below which a subproblem is solved
    double projection_tol = 1e-10;
    int projection_cap = 5000;
    int randomization_trials = 500;

    bool operator==(const SolverSettings&) const = default;
};

// Deterministic scenario parameters. Defaults are the reference simulation setup.
struct ScenarioConfig {
    Vec3 bs_pos{5.0, 0.0, 20.0};
    Vec3 ut_pos{0.0, 100.0, 0.0};
    Vec3 eve_pos{0.0, 105.0, 0.0};
    Vec3 irs_pos{0.0, 100.0, 20.0};

    double pl0_db = 30.0;
    double c_ab = 3.5;
    double c_ae = 3.5;
    double c_be = 3.5;
    double c_q = 2.0;
    double c_gu = 2.0;
    double c_ge = 2.0;

    double tx_power_dbm = 20.0;
    double noise1_dbm = -80.0;
    double noise2_dbm = -80.0;

    int bs_antennas = 4;
    int irs_rows = 4;
    int irs_cols = 5;
    double spacing_ratio = 0.1;

    AngleOverrides angles;
    std::uint64_t seed = 1;
    SolverSettings solver;

    bool operator==(const ScenarioConfig&) const = default;
};

// A validated scenario with every unit conversion done once. Downstream code only
// consumes linear quantities from here.
struct Scenario {
    ScenarioConfig config;

    int M = 0;  // BS antennas
    int X = 0;  // IRS rows
    int Y = 0;  // IRS columns
    int L = 0;  // IRS elements, X * Y

    double tx_power_w = 0.0;
    double noise1_w = 0.0;
    double noise2_w = 0.0;

    // Link-gain variances 10^(-PL(d) / 10).
    double var_ab = 0.0;
    double var_ae = 0.0;
    double var_be = 0.0;
    double var_q = 0.0;
    double var_gu = 0.0;
    double var_ge = 0.0;

    AngleSet angles;

    // Post-LS estimation noise variances sigma1^2 / P and sigma2^2 / P.
    double est_noise1() const { return noise1_w / tx_power_w; }
    double est_noise2() const { return noise2_w / tx_power_w; }
};

double path_loss_db(double distance_m, double exponent, double pl0_db);

// Link-gain variance 10^(-0.1 PL).
double link_variance(double path_loss_db);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

double distance(const Vec3& a, const Vec3& b);

// (theta, gamma) of a direction seen from the IRS, per the convention above.
std::array<double, 2> irs_direction_angles(const Vec3& from_irs);

// phi_bs of a direction leaving the BS, per the convention above.
double bs_azimuth(const Vec3& from_bs);

// Angles from geometry; any explicit override in config.angles replaces the
// derived value.
AngleSet derive_angles(const ScenarioConfig& config);

// IRS grid shape for L elements: X = largest divisor of L not above sqrt(L), Y = L / X.
std::array<int, 2> factor_irs_grid(int elements);

// Validates config and performs all unit conversions.
Scenario resolve(const ScenarioConfig& config);

}  // namespace irskg
