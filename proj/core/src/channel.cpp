#include "irskg/channel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace irskg {

double irs_phase(double theta, double gamma, int x, int y, double spacing_ratio) {
    return -2.0 * kPi * spacing_ratio *
           (x * std::sin(theta) * std::sin(gamma) + y * std::cos(gamma));
}

SteeringVector bs_steering(double phi, int antennas, double spacing_ratio) {
    SteeringVector a{CVector(antennas)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
    for (int m = 0; m < antennas; ++m) {
        a.entries[m] = std::polar(scale, -2.0 * kPi * spacing_ratio * m * std::sin(phi));
    }
    return a;
}

SteeringVector irs_steering(double theta, double gamma, int rows, int cols, double spacing_ratio) {
    SteeringVector a{CVector(rows * cols)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows * cols));
    for (int x = 0; x < rows; ++x) {
        for (int y = 0; y < cols; ++y) {
            a.entries[x * cols + y] = std::polar(scale, irs_phase(theta, gamma, x, y, spacing_ratio));
        }
    }
    return a;
}

ChannelGains sample_gains(const Scenario& scenario, Rng& rng) {
    ChannelGains g;
    g.alpha_q = complex_gaussian(rng, scenario.var_q);
    g.alpha_gu = complex_gaussian(rng, scenario.var_gu);
    g.alpha_ge = complex_gaussian(rng, scenario.var_ge);
    return g;
}

ChannelRealization realization_with_gains(const Scenario& scenario, const ChannelGains& gains, Rng& rng) {
    const int M = scenario.M;
    const int L = scenario.L;
    const double s = scenario.config.spacing_ratio;
    const AngleSet& ang = scenario.angles;

    ChannelRealization r;
    r.gains = gains;
    r.h_ab.resize(M);
    r.h_ae.resize(M);
    for (int m = 0; m < M; ++m) {
        r.h_ab[m] = complex_gaussian(rng, scenario.var_ab);
    }
    for (int m = 0; m < M; ++m) {
        r.h_ae[m] = complex_gaussian(rng, scenario.var_ae);
    }
    r.h_be = complex_gaussian(rng, scenario.var_be);

    const CVector a_bs = bs_steering(ang.phi_bs, M, s).entries;
    const CVector a_irs = irs_steering(ang.theta_irs, ang.gamma_irs, scenario.X, scenario.Y, s).entries;
    const CVector a_ut = irs_steering(ang.phi_irs_ut, ang.omega_irs_ut, scenario.X, scenario.Y, s).entries;
    const CVector a_eve = irs_steering(ang.phi_irs_eve, ang.omega_irs_eve, scenario.X, scenario.Y, s).entries;

    r.Q = std::sqrt(static_cast<double>(M) * L) * gains.alpha_q * (a_irs * a_bs.adjoint());
    r.G_U = std::sqrt(static_cast<double>(L)) * gains.alpha_gu * a_ut.conjugate();
    r.G_E = std::sqrt(static_cast<double>(L)) * gains.alpha_ge * a_eve.conjugate();
    r.R_U = r.G_U.asDiagonal() * r.Q;
    r.R_E = r.G_E.asDiagonal() * r.Q;
    return r;
}

ChannelRealization sample_realization(const Scenario& scenario, Rng& rng) {
    const ChannelGains gains = sample_gains(scenario, rng);
    return realization_with_gains(scenario, gains, rng);
}

GeometryVectors geometry_vectors(const Scenario& scenario) {
    const int M = scenario.M;
    const double s = scenario.config.spacing_ratio;
    const AngleSet& ang = scenario.angles;

    GeometryVectors g;
    g.beta.resize(scenario.L);
    g.psi.resize(scenario.L);
    for (int x = 0; x < scenario.X; ++x) {
        for (int y = 0; y < scenario.Y; ++y) {
            const double in = irs_phase(ang.theta_irs, ang.gamma_irs, x, y, s);
            const int n = x * scenario.Y + y;
            g.beta[n] = std::polar(1.0, in - irs_phase(ang.phi_irs_ut, ang.omega_irs_ut, x, y, s));
            g.psi[n] = std::polar(1.0, in - irs_phase(ang.phi_irs_eve, ang.omega_irs_eve, x, y, s));
        }
    }
    g.bs_response.resize(M);
    for (int m = 0; m < M; ++m) {
        g.bs_response[m] = std::polar(1.0, 2.0 * kPi * s * m * std::sin(ang.phi_bs));
    }
    g.R_BS = g.bs_response * g.bs_response.adjoint();
    return g;
}

namespace {

void put(std::ostream& out, const char* field, Eigen::Index row, Eigen::Index col, Complex z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
    out << field << ',' << row << ',' << col << ',' << buf << '\n';
}

template <typename Derived>
void put_matrix(std::ostream& out, const char* field, const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put(out, field, i, j, m(i, j));
        }
    }
}

}  // namespace

void write_realization_csv(std::ostream& out, const ChannelRealization& r) {
    out << "field,row,col,re,im\n";
    put_matrix(out, "h_ab", r.h_ab.transpose());
    put_matrix(out, "h_ae", r.h_ae.transpose());
    put(out, "h_be", 0, 0, r.h_be);
    put(out, "alpha_q", 0, 0, r.gains.alpha_q);
    put(out, "alpha_gu", 0, 0, r.gains.alpha_gu);
    put(out, "alpha_ge", 0, 0, r.gains.alpha_ge);
    put_matrix(out, "Q", r.Q);
    put_matrix(out, "G_U", r.G_U.transpose());
    put_matrix(out, "G_E", r.G_E.transpose());
    put_matrix(out, "R_U", r.R_U);
    put_matrix(out, "R_E", r.R_E);
}

}  // namespace irskg
