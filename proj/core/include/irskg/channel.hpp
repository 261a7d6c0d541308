#pragma once

#include <complex>
#include <iosfwd>

#include <Eigen/Dense>

#include "irskg/random.hpp"
#include "irskg/scenario.hpp"

namespace irskg {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Normalized array response: unit-modulus entries scaled by 1/sqrt(size).
struct SteeringVector {
    CVector entries;
};

// Phase (radians) of element (x, y), 0-based: exp(tau_{x,y}) = exp(j * irs_phase).
double irs_phase(double theta, double gamma, int x, int y, double spacing_ratio);

// entry m = exp(-j 2 pi s m sin(phi)) / sqrt(M)
SteeringVector bs_steering(double phi, int antennas, double spacing_ratio);

// entry n = x * Y + y: exp(j irs_phase(theta, gamma, x, y)) / sqrt(X Y)
SteeringVector irs_steering(double theta, double gamma, int rows, int cols, double spacing_ratio);

struct ChannelGains {
    Complex alpha_q;
    Complex alpha_gu;
    Complex alpha_ge;
};

// One draw of every link. Row vectors (1xM, 1xL) are stored as Eigen column
// vectors; the row/column reading is the one written next to each field.
struct ChannelRealization {
    CVector h_ab;         // 1 x M, BS -> UT direct
    CVector h_ae;         // 1 x M, BS -> Eve direct
    Complex h_be;         // UT <-> Eve; sampled, consumed by nothing
    ChannelGains gains;
    CMatrix Q;            // L x M, sqrt(ML) alpha_q a_irs a_bs^H
    CVector G_U;          // 1 x L, sqrt(L) alpha_gu a_irs_ut^H
    CVector G_E;          // 1 x L, sqrt(L) alpha_ge a_irs_eve^H
    CMatrix R_U;          // L x M, diag(G_U) Q
    CMatrix R_E;          // L x M, diag(G_E) Q
};

ChannelGains sample_gains(const Scenario& scenario, Rng& rng);

// Builds Q, G_U, G_E, R_U, R_E for the given gains and fresh direct links.
ChannelRealization sample_realization(const Scenario& scenario, Rng& rng);

// As sample_realization but with the cascaded gains held fixed.
ChannelRealization realization_with_gains(const Scenario& scenario, const ChannelGains& gains, Rng& rng);

struct GeometryVectors {
    CVector beta;   // L, exp(tau(theta_irs, gamma_irs) - tau(phi_irs_ut, omega_irs_ut))
    CVector psi;    // L, exp(tau(theta_irs, gamma_irs) - tau(phi_irs_eve, omega_irs_eve))
    CVector bs_response;  // M, unnormalized: exp(+j 2 pi s m sin(phi_bs))
    CMatrix R_BS;   // M x M, bs_response * bs_response^H
};

GeometryVectors geometry_vectors(const Scenario& scenario);

// CSV dump: one header line, then one row per matrix entry:
//   field,row,col,re,im
// with fields h_ab, h_ae, h_be, alpha_q, alpha_gu, alpha_ge, Q, G_U, G_E, R_U, R_E.
void write_realization_csv(std::ostream& out, const ChannelRealization& realization);

}  // namespace irskg
