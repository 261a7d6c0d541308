#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "irskg/channel.hpp"
#include "irskg/keyrate.hpp"
#include "irskg/random.hpp"
#include "irskg/scenario.hpp"

namespace irskg::testing {

inline double rel_err(double value, double reference) {
    const double d = std::abs(reference);
    return std::abs(value - reference) / (d > 0.0 ? d : 1.0);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

inline CVector random_phases(Rng& rng, int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = std::polar(1.0, uniform_phase(rng));
    }
    return v;
}

inline CMatrix random_gaussian_matrix(Rng& rng, int rows, int cols) {
    CMatrix A(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            A(i, j) = complex_gaussian(rng, 1.0);
        }
    }
    return A;
}

inline CMatrix random_hermitian(Rng& rng, int n) {
    const CMatrix A = random_gaussian_matrix(rng, n, n);
    return 0.5 * (A + A.adjoint());
}

// U U^H with unit-norm rows of a Gaussian U.
inline CMatrix random_elliptope_point(Rng& rng, int n) {
    CMatrix U = random_gaussian_matrix(rng, n, n);
    for (int i = 0; i < n; ++i) {
        U.row(i).normalize();
    }
    return U * U.adjoint();
}

// Unnormalized BS response with a random spacing and angle.
inline CMatrix random_rbs(Rng& rng, int M) {
    std::uniform_real_distribution<double> spacing(0.05, 0.5);
    const double s = spacing(rng);
    const double phi = uniform_phase(rng);
    CVector a(M);
    for (int m = 0; m < M; ++m) {
        a[m] = std::polar(1.0, 2.0 * kPi * s * m * std::sin(phi));
    }
    return a * a.adjoint();
}

struct RandomTuple {
    EffectiveStatistics stats;
    CMatrix R_BS;
};

// Random geometry, phases and positive variances spread over several decades.
inline RandomTuple random_tuple(Rng& rng, int M, int L) {
    const CVector beta = random_phases(rng, L);
    const CVector psi = random_phases(rng, L);
    const CVector v = random_phases(rng, L);
    const Complex vb = (v.transpose() * beta)(0);
    const Complex vp = (v.transpose() * psi)(0);
    const double c_u = log_uniform(rng, 1e-3, 1e1) / L;
    const double c_e = log_uniform(rng, 1e-3, 1e1) / L;
    const Complex p_l = std::polar(std::sqrt(c_u * c_e), uniform_phase(rng)) * vb * std::conj(vp);
    RandomTuple t;
    t.stats = make_statistics(M, c_u * std::norm(vb), c_e * std::norm(vp), p_l, log_uniform(rng, 1e-2, 1e1),
                              log_uniform(rng, 1e-2, 1e1), log_uniform(rng, 1e-2, 1e1),
                              log_uniform(rng, 1e-2, 1e1), log_uniform(rng, 1e-2, 1e1));
    t.stats.c_u = c_u;
    t.stats.c_e = c_e;
    t.R_BS = random_rbs(rng, M);
    return t;
}

// Independent determinant oracle: stacks the observation covariance blocks from
// the scalar statistics and takes log2 det by Cholesky in long double.
using LMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

inline long double log2_det_cholesky(const LMatrix& A) {
    Eigen::LLT<LMatrix> llt(A);
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        sum += std::log2(llt.matrixL()(i, i).real());
    }
    return 2.0L * sum;
}

inline LMatrix widen(const CMatrix& A) { return A.cast<std::complex<long double>>(); }

inline long double oracle_rate(const EffectiveStatistics& s, const CMatrix& R_BS) {
    const int M = s.M;
    const LMatrix R = widen(R_BS);
    const LMatrix I = LMatrix::Identity(M, M);
    const long double su = static_cast<long double>(s.est_noise1) + s.var_ab;
    const long double se = static_cast<long double>(s.est_noise2) + s.var_ae;
    const LMatrix WU = static_cast<long double>(s.p_u) * R;
    const LMatrix WE = static_cast<long double>(s.p_e) * R;
    const LMatrix WL = std::complex<long double>(s.p_l.real(), s.p_l.imag()) * R;
    const LMatrix Kaa = WU + su * I;
    const LMatrix Kab = WU + static_cast<long double>(s.var_ab) * I;
    const LMatrix Kee = WE + se * I;

    LMatrix ae(2 * M, 2 * M);
    ae << Kaa, WL, WL.adjoint(), Kee;
    LMatrix abe(3 * M, 3 * M);
    abe << Kaa, Kab, WL, Kab.adjoint(), Kaa, WL, WL.adjoint(), WL.adjoint(), Kee;
    // A and B see the same statistics, so R_BE equals R_AE.
    return 2.0L * log2_det_cholesky(ae) - log2_det_cholesky(Kee) - log2_det_cholesky(abe);
}

inline long double oracle_rate_no_eve(const EffectiveStatistics& s, const CMatrix& R_BS) {
    const int M = s.M;
    const LMatrix R = widen(R_BS);
    const LMatrix I = LMatrix::Identity(M, M);
    const LMatrix WU = static_cast<long double>(s.p_u) * R;
    const LMatrix Kaa = WU + (static_cast<long double>(s.est_noise1) + s.var_ab) * I;
    const LMatrix Kab = WU + static_cast<long double>(s.var_ab) * I;
    LMatrix ab(2 * M, 2 * M);
    ab << Kaa, Kab, Kab.adjoint(), Kaa;
    return 2.0L * log2_det_cholesky(Kaa) - log2_det_cholesky(ab);
}

inline Scenario default_scenario() { return resolve(ScenarioConfig{}); }

inline Scenario scenario_with(int L, int M) {
    ScenarioConfig cfg;
    const auto grid = factor_irs_grid(L);
    cfg.irs_rows = grid[0];
    cfg.irs_cols = grid[1];
    cfg.bs_antennas = M;
    return resolve(cfg);
}

}  // namespace irskg::testing
