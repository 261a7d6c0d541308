#pragma once

#include <array>
#include <optional>
#include <vector>

#include "irskg/channel.hpp"

namespace irskg {

// Scalars the rate formulas consume. Variances are in linear units (W-normalized
// link gains); the "est_noise" fields are the post-LS noise variances sigma^2 / P.
struct EffectiveStatistics {
    int M = 1;
    double c_u = 0.0;  // |alpha_gu alpha_q|^2
    double c_e = 0.0;  // |alpha_ge alpha_q|^2
    double p_u = 0.0;
    double p_e = 0.0;
    Complex p_l{0.0, 0.0};
    double est_noise1 = 0.0;
    double est_noise2 = 0.0;
    double var_ab = 0.0;
    double var_ae = 0.0;
    double sigma_u2 = 0.0;  // est_noise1 + var_ab
    double sigma_e2 = 0.0;  // est_noise2 + var_ae
    double sigma_n2 = 0.0;  // est_noise1 + 2 var_ab
    double tx_power_w = 1.0;
};

// Fills the derived variances from the primitive ones.
EffectiveStatistics make_statistics(int M, double p_u, double p_e, Complex p_l, double est_noise1,
                                    double est_noise2, double var_ab, double var_ae,
                                    double tx_power_w = 1.0);

// p_U = c_u |v^T beta|^2, p_E = c_e |v^T psi|^2,
// p_L = alpha_gu conj(alpha_ge) |alpha_q|^2 (v^T beta) conj(v^T psi).
// Throws PreconditionError unless every |v_n| = 1.
EffectiveStatistics effective_stats(const CVector& v, const GeometryVectors& geo, const ChannelGains& gains,
                                    const Scenario& scenario);

// Same statistics with the reflection gains replaced by explicit p values.
EffectiveStatistics with_reflection(const EffectiveStatistics& base, double p_u, double p_e, Complex p_l);

struct CovarianceSet {
    CMatrix W_U, W_E, W_L;
    CMatrix K_AA, K_BB, K_EE, K_AB, K_AE, K_BE;
    CMatrix R_E;    // M x M
    CMatrix R_AE;   // 2M x 2M, blocks (A, E)
    CMatrix R_BE;   // 2M x 2M, blocks (B, E)
    CMatrix R_AB;   // 2M x 2M, blocks (A, B)
    CMatrix R_ABE;  // 3M x 3M, blocks (A, B, E)
};

// W_X = p_X R_BS; K blocks and stacked matrices with blocks K_xy = E{H_x H_y^H}.
// Throws ConfigError on a negative effective variance.
CovarianceSet covariance_set(const EffectiveStatistics& stats, const CMatrix& R_BS);

// log2 det of a Hermitian positive-definite matrix via its eigenvalues.
// Throws DegenerateInputError when the matrix is not numerically positive definite.
double log2_det_hermitian(const CMatrix& A);

// I(H_A; H_B | H_E) from the stacked determinants.
double rate_direct(const CovarianceSet& cov);

// Same quantity through the Schur-complement factorization of each determinant.
double rate_factorized(const EffectiveStatistics& stats, const CovarianceSet& cov);

struct FractionTerms {
    double f = 0.0;
    double g = 0.0;
};

// f = (s_E M p_U + s_U M p_E + s_E s_U)^2
// g = (M p_E + s_E)(2 s_E M p_U + s_N M p_E + s_E s_N)
FractionTerms fraction_terms(const EffectiveStatistics& stats);

// Which noise variance enters the constant term of the closed form.
enum class ClosedFormConstant {
    kEstimationNoise,  // (sigma1^2 / P)^M; agrees with the determinants
    kRawNoise,         // (sigma1^2)^M; fault injection only
};

// Closed-form secret key rate in bits:
// log2(f / g) + log2(s_U^(2M-2) / ((sigma1^2 / P)^M s_N^(M-1))).
double rate_closed(const EffectiveStatistics& stats,
                   ClosedFormConstant constant = ClosedFormConstant::kEstimationNoise);

// Constant (v-independent) part of rate_closed.
double rate_constant(const EffectiveStatistics& stats,
                     ClosedFormConstant constant = ClosedFormConstant::kEstimationNoise);

// I(H_A; H_B) from the 2M x 2M stacked determinant.
double rate_no_eve(const CovarianceSet& cov);

// I(H_A; H_B) in closed form: log2((M p_U + s_U)^2 / (s1 (2 M p_U + s_N)))
// + (M - 1) log2(s_U^2 / (s1 s_N)).
double rate_no_eve_closed(const EffectiveStatistics& stats);

// 2M log2(s_U) - M log2(s1 s_N).
double rate_no_irs(const EffectiveStatistics& stats);

// (with - without) / without * 100. Throws DomainError unless without > 0.
double rate_reduction(double optimum_with_eve, double optimum_no_eve);

// One noise floor with (M - 1)-fold multiplicity and one shifted eigenvalue.
struct ShiftedSpectrum {
    double floor = 0.0;
    double shifted = 0.0;
};

// Closed forms for the four Hermitian terms of the eigenvalue expansion:
//   W_U + s_U I
//   W_E + s_E I
//   W_E + s_E I - W_L^H (W_U + s_U I)^-1 W_L
//   2 W_U + s_N I - 2 W_L (W_E + s_E I)^-1 W_L^H
std::array<ShiftedSpectrum, 4> predicted_spectra(const EffectiveStatistics& stats);

// The same four matrices assembled explicitly.
std::array<CMatrix, 4> spectral_terms(const EffectiveStatistics& stats, const CovarianceSet& cov);

struct KeyRateReport {
    double rate_closed = 0.0;
    double rate_direct = 0.0;
    double rate_no_irs = 0.0;
    double rate_no_eve = 0.0;
    std::optional<double> reduction_percent;
    std::optional<double> relaxed_bound;
    std::vector<std::vector<double>> eigenvalues;  // ascending, one list per spectral term
};

KeyRateReport key_rate_report(const EffectiveStatistics& stats, const CMatrix& R_BS);

}  // namespace irskg
