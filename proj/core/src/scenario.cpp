#include "irskg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "irskg/errors.hpp"

namespace irskg {

namespace {

Vec3 difference(const Vec3& to, const Vec3& from) {
    return {to[0] - from[0], to[1] - from[1], to[2] - from[2]};
}

Vec3 unit(const Vec3& v, const char* what) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(n > 0.0)) {
        throw DomainError(std::string("coincident nodes: ") + what);
    }
    return {v[0] / n, v[1] / n, v[2] / n};
}

void check_range(const std::optional<double>& value, double lo, double hi, const char* name) {
    if (value && !(*value >= lo && *value <= hi)) {
        throw ConfigError(std::string(name) + " override outside its angle range");
    }
}

}  // namespace

double path_loss_db(double distance_m, double exponent, double pl0_db) {
    if (!(distance_m > 0.0)) {
        throw DomainError("path loss needs a positive distance");
    }
    return pl0_db + 10.0 * exponent * std::log10(distance_m);
}

double link_variance(double path_loss_db) { return std::pow(10.0, -0.1 * path_loss_db); }

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double watts_to_dbm(double watts) {
    if (!(watts > 0.0)) {
        throw DomainError("dBm conversion needs positive power");
    }
    return 10.0 * std::log10(watts * 1e3);
}

double distance(const Vec3& a, const Vec3& b) {
    const Vec3 d = difference(a, b);
    return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
}

std::array<double, 2> irs_direction_angles(const Vec3& from_irs) {
    const Vec3 u = unit(from_irs, "IRS direction");
    // Tolerate rounding noise on the boundary plane u_x = 0.
    constexpr double kPlaneTol = 1e-12;
    if (u[0] < -kPlaneTol) {
        throw DomainError("direction has negative x component; not representable with theta in [0, pi]");
    }
    const double ux = std::max(u[0], 0.0);
    const double gamma = std::acos(std::clamp(u[1], -1.0, 1.0));
    const double transverse = std::hypot(ux, u[2]);
    const double theta = transverse > 0.0 ? std::atan2(ux, u[2]) : 0.0;
    return {theta, gamma};
}

double bs_azimuth(const Vec3& from_bs) {
    const Vec3 u = unit(from_bs, "BS direction");
    if (std::hypot(u[0], u[1]) == 0.0) {
        return 0.0;
    }
    double phi = std::atan2(u[0], u[1]);
    if (phi < 0.0) {
        phi += 2.0 * kPi;
    }
    return phi;
}

AngleSet derive_angles(const ScenarioConfig& config) {
    const Vec3& bs = config.bs_pos;
    const Vec3& ut = config.ut_pos;
    const Vec3& eve = config.eve_pos;
    const Vec3& irs = config.irs_pos;

    // Every pair of nodes must be distinct.
    unit(difference(bs, ut), "BS/UT");
    unit(difference(bs, eve), "BS/Eve");
    unit(difference(ut, eve), "UT/Eve");

    const AngleOverrides& o = config.angles;
    check_range(o.phi_bs, 0.0, 2.0 * kPi, "phi_bs");
    check_range(o.theta_irs, 0.0, kPi, "theta_irs");
    check_range(o.gamma_irs, 0.0, kPi, "gamma_irs");
    check_range(o.phi_irs_ut, 0.0, kPi, "phi_irs_ut");
    check_range(o.omega_irs_ut, 0.0, kPi, "omega_irs_ut");
    check_range(o.phi_irs_eve, 0.0, kPi, "phi_irs_eve");
    check_range(o.omega_irs_eve, 0.0, kPi, "omega_irs_eve");

    // Only compute what is not overridden, so an override can stand in for a
    // direction the convention cannot represent.
    AngleSet a;
    a.phi_bs = o.phi_bs ? *o.phi_bs : bs_azimuth(difference(irs, bs));
    if (o.theta_irs && o.gamma_irs) {
        a.theta_irs = *o.theta_irs;
        a.gamma_irs = *o.gamma_irs;
    } else {
        const auto arrival = irs_direction_angles(difference(bs, irs));
        a.theta_irs = o.theta_irs.value_or(arrival[0]);
        a.gamma_irs = o.gamma_irs.value_or(arrival[1]);
    }
    if (o.phi_irs_ut && o.omega_irs_ut) {
        a.phi_irs_ut = *o.phi_irs_ut;
        a.omega_irs_ut = *o.omega_irs_ut;
    } else {
        const auto to_ut = irs_direction_angles(difference(ut, irs));
        a.phi_irs_ut = o.phi_irs_ut.value_or(to_ut[0]);
        a.omega_irs_ut = o.omega_irs_ut.value_or(to_ut[1]);
    }
    if (o.phi_irs_eve && o.omega_irs_eve) {
        a.phi_irs_eve = *o.phi_irs_eve;
        a.omega_irs_eve = *o.omega_irs_eve;
    } else {
        const auto to_eve = irs_direction_angles(difference(eve, irs));
        a.phi_irs_eve = o.phi_irs_eve.value_or(to_eve[0]);
        a.omega_irs_eve = o.omega_irs_eve.value_or(to_eve[1]);
    }
    return a;
}

std::array<int, 2> factor_irs_grid(int elements) {
    if (elements < 1) {
        throw ConfigError("IRS element count must be at least 1");
    }
    int rows = 1;
    for (int d = 1; static_cast<long long>(d) * d <= elements; ++d) {
        if (elements % d == 0) {
            rows = d;
        }
    }
    return {rows, elements / rows};
}

Scenario resolve(const ScenarioConfig& config) {
    if (config.bs_antennas < 1) {
        throw ConfigError("bs_antennas must be >= 1");
    }
    if (config.irs_rows < 1 || config.irs_cols < 1) {
        throw ConfigError("irs_rows and irs_cols must be >= 1");
    }
    if (!(config.spacing_ratio > 0.0)) {
        throw ConfigError("spacing_ratio must be > 0");
    }
    const SolverSettings& s = config.solver;
    if (!(s.inner_tol > 0.0) || !(s.outer_tol > 0.0) || !(s.subproblem_tol > 0.0) ||
        !(s.projection_tol > 0.0)) {
        throw ConfigError("solver tolerances must be > 0");
    }
    if (s.inner_cap < 1 || s.outer_cap < 1 || s.subproblem_cap < 1 || s.projection_cap < 1 ||
        s.randomization_trials < 1) {
        throw ConfigError("solver caps and randomization_trials must be >= 1");
    }

    Scenario sc;
    sc.config = config;
    sc.M = config.bs_antennas;
    sc.X = config.irs_rows;
    sc.Y = config.irs_cols;
    sc.L = sc.X * sc.Y;

    sc.angles = derive_angles(config);

    sc.tx_power_w = dbm_to_watts(config.tx_power_dbm);
    sc.noise1_w = dbm_to_watts(config.noise1_dbm);
    sc.noise2_w = dbm_to_watts(config.noise2_dbm);

    const auto budget = [&](const Vec3& a, const Vec3& b, double c) {
        return link_variance(path_loss_db(distance(a, b), c, config.pl0_db));
    };
    sc.var_ab = budget(config.bs_pos, config.ut_pos, config.c_ab);
    sc.var_ae = budget(config.bs_pos, config.eve_pos, config.c_ae);
    sc.var_be = budget(config.ut_pos, config.eve_pos, config.c_be);
    sc.var_q = budget(config.bs_pos, config.irs_pos, config.c_q);
    sc.var_gu = budget(config.irs_pos, config.ut_pos, config.c_gu);
    sc.var_ge = budget(config.irs_pos, config.eve_pos, config.c_ge);
    return sc;
}

}  // namespace irskg
