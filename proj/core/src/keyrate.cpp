#include "irskg/keyrate.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "irskg/errors.hpp"

namespace irskg {

namespace {

constexpr double kUnitModulusTol = 1e-9;

CMatrix stack(std::initializer_list<std::initializer_list<const CMatrix*>> blocks) {
    const Eigen::Index n = blocks.begin()->begin()[0]->rows();
    const Eigen::Index k = static_cast<Eigen::Index>(blocks.size());
    CMatrix out(n * k, n * k);
    Eigen::Index i = 0;
    for (const auto& row : blocks) {
        Eigen::Index j = 0;
        for (const CMatrix* b : row) {
            out.block(i * n, j * n, n, n) = *b;
            ++j;
        }
        ++i;
    }
    return out;
}

CMatrix hermitian_part(const CMatrix& A) { return 0.5 * (A + A.adjoint()); }

}  // namespace

EffectiveStatistics make_statistics(int M, double p_u, double p_e, Complex p_l, double est_noise1,
                                    double est_noise2, double var_ab, double var_ae, double tx_power_w) {
    if (M < 1) {
        throw ConfigError("M must be >= 1");
    }
    EffectiveStatistics s;
    s.M = M;
    s.p_u = p_u;
    s.p_e = p_e;
    s.p_l = p_l;
    s.est_noise1 = est_noise1;
    s.est_noise2 = est_noise2;
    s.var_ab = var_ab;
    s.var_ae = var_ae;
    s.sigma_u2 = est_noise1 + var_ab;
    s.sigma_e2 = est_noise2 + var_ae;
    s.sigma_n2 = est_noise1 + 2.0 * var_ab;
    s.tx_power_w = tx_power_w;
    return s;
}

EffectiveStatistics with_reflection(const EffectiveStatistics& base, double p_u, double p_e, Complex p_l) {
    EffectiveStatistics s = base;
    s.p_u = p_u;
    s.p_e = p_e;
    s.p_l = p_l;
    return s;
}

EffectiveStatistics effective_stats(const CVector& v, const GeometryVectors& geo, const ChannelGains& gains,
                                    const Scenario& scenario) {
    if (v.size() != geo.beta.size()) {
        throw PreconditionError("reflection vector length does not match the IRS size");
    }
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        if (std::abs(std::abs(v[n]) - 1.0) > kUnitModulusTol) {
            throw PreconditionError("reflection vector must have unit-modulus entries");
        }
    }
    const Complex vb = (v.transpose() * geo.beta)(0);
    const Complex vp = (v.transpose() * geo.psi)(0);
    const double q2 = std::norm(gains.alpha_q);

    EffectiveStatistics s = make_statistics(scenario.M, 0.0, 0.0, {}, scenario.est_noise1(), scenario.est_noise2(),
                                            scenario.var_ab, scenario.var_ae, scenario.tx_power_w);
    s.c_u = std::norm(gains.alpha_gu) * q2;
    s.c_e = std::norm(gains.alpha_ge) * q2;
    s.p_u = s.c_u * std::norm(vb);
    s.p_e = s.c_e * std::norm(vp);
    s.p_l = gains.alpha_gu * std::conj(gains.alpha_ge) * q2 * vb * std::conj(vp);
    return s;
}

CovarianceSet covariance_set(const EffectiveStatistics& s, const CMatrix& R_BS) {
    if (s.sigma_u2 < 0.0 || s.sigma_e2 < 0.0 || s.sigma_n2 < 0.0 || s.est_noise1 < 0.0 || s.est_noise2 < 0.0 ||
        s.var_ab < 0.0 || s.var_ae < 0.0 || s.p_u < 0.0 || s.p_e < 0.0) {
        throw ConfigError("negative effective variance");
    }
    if (R_BS.rows() != s.M || R_BS.cols() != s.M) {
        throw ConfigError("R_BS dimension does not match M");
    }
    const CMatrix I = CMatrix::Identity(s.M, s.M);
    const CMatrix R = hermitian_part(R_BS);

    CovarianceSet c;
    c.W_U = s.p_u * R;
    c.W_E = s.p_e * R;
    c.W_L = s.p_l * R;
    c.K_AA = c.W_U + s.sigma_u2 * I;
    c.K_BB = c.K_AA;
    c.K_EE = c.W_E + s.sigma_e2 * I;
    c.K_AB = c.W_U + s.var_ab * I;
    c.K_AE = c.W_L;
    c.K_BE = c.W_L;
    c.R_E = c.K_EE;

    const CMatrix K_BA = c.K_AB.adjoint();
    const CMatrix K_EA = c.K_AE.adjoint();
    const CMatrix K_EB = c.K_BE.adjoint();
    c.R_AE = hermitian_part(stack({{&c.K_AA, &c.K_AE}, {&K_EA, &c.K_EE}}));
    c.R_BE = hermitian_part(stack({{&c.K_BB, &c.K_BE}, {&K_EB, &c.K_EE}}));
    c.R_AB = hermitian_part(stack({{&c.K_AA, &c.K_AB}, {&K_BA, &c.K_BB}}));
    c.R_ABE = hermitian_part(stack({{&c.K_AA, &c.K_AB, &c.K_AE}, {&K_BA, &c.K_BB, &c.K_BE}, {&K_EA, &K_EB, &c.K_EE}}));
    return c;
}

namespace {

// Extended precision: the four log-determinants of rate_direct are O(10..100)
// each while the rate can be O(1e-5), so double rounding alone would cost
// several digits of the difference.
long double log2_det_extended(const CMatrix& A) {
    using XComplex = std::complex<long double>;
    using XMatrix = Eigen::Matrix<XComplex, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = A.rows();
    if (n == 0) {
        return 0.0L;
    }
    // Scale to unit mean diagonal first: entries around 1e-10 would otherwise
    // push the determinant towards underflow for larger n.
    const double scale = A.diagonal().real().cwiseAbs().mean();
    if (!(scale > 0.0)) {
        throw DegenerateInputError("zero matrix has no log-determinant");
    }
    const CMatrix H = hermitian_part(A);
    XMatrix X(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            X(i, j) = XComplex(H(i, j).real(), H(i, j).imag()) / static_cast<long double>(scale);
        }
    }
    Eigen::SelfAdjointEigenSolver<XMatrix> eig(X, Eigen::EigenvaluesOnly);
    const auto& lambda = eig.eigenvalues();
    const long double floor = 64.0L * std::numeric_limits<double>::epsilon() * std::abs(lambda[n - 1]);
    if (!(lambda[0] > floor)) {
        throw DegenerateInputError("covariance is singular or indefinite");
    }
    long double sum = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
        sum += std::log2(lambda[i]);
    }
    return sum + static_cast<long double>(n) * std::log2(static_cast<long double>(scale));
}

}  // namespace

double log2_det_hermitian(const CMatrix& A) { return static_cast<double>(log2_det_extended(A)); }

double rate_direct(const CovarianceSet& cov) {
    return static_cast<double>(log2_det_extended(cov.R_AE) + log2_det_extended(cov.R_BE) -
                               log2_det_extended(cov.R_E) - log2_det_extended(cov.R_ABE));
}

double rate_factorized(const EffectiveStatistics& s, const CovarianceSet& cov) {
    const CMatrix I = CMatrix::Identity(s.M, s.M);
    const auto solve = [](const CMatrix& K, const CMatrix& rhs) { return K.ldlt().solve(rhs).eval(); };

    const double det_ae = log2_det_hermitian(cov.K_AA) +
                          log2_det_hermitian(cov.K_EE - cov.K_AE.adjoint() * solve(cov.K_AA, cov.K_AE));
    const double det_be = log2_det_hermitian(cov.K_BB) +
                          log2_det_hermitian(cov.K_EE - cov.K_BE.adjoint() * solve(cov.K_BB, cov.K_BE));
    const double det_e = log2_det_hermitian(cov.K_EE);
    const double det_abe =
        s.M * std::log2(s.est_noise1) + log2_det_hermitian(cov.K_EE) +
        log2_det_hermitian(2.0 * cov.W_U + s.sigma_n2 * I - 2.0 * cov.W_L * solve(cov.K_EE, cov.W_L.adjoint()));
    return det_ae + det_be - det_e - det_abe;
}

FractionTerms fraction_terms(const EffectiveStatistics& s) {
    const double M = s.M;
    const double num = s.sigma_e2 * M * s.p_u + s.sigma_u2 * M * s.p_e + s.sigma_e2 * s.sigma_u2;
    FractionTerms t;
    t.f = num * num;
    t.g = (M * s.p_e + s.sigma_e2) * (2.0 * s.sigma_e2 * M * s.p_u + s.sigma_n2 * M * s.p_e + s.sigma_e2 * s.sigma_n2);
    return t;
}

double rate_constant(const EffectiveStatistics& s, ClosedFormConstant constant) {
    const double noise =
        constant == ClosedFormConstant::kEstimationNoise ? s.est_noise1 : s.est_noise1 * s.tx_power_w;
    const double M = s.M;
    return (2.0 * M - 2.0) * std::log2(s.sigma_u2) - M * std::log2(noise) - (M - 1.0) * std::log2(s.sigma_n2);
}

double rate_closed(const EffectiveStatistics& s, ClosedFormConstant constant) {
    const FractionTerms t = fraction_terms(s);
    return std::log2(t.f) - std::log2(t.g) + rate_constant(s, constant);
}

double rate_no_eve(const CovarianceSet& cov) {
    return log2_det_hermitian(cov.K_AA) + log2_det_hermitian(cov.K_BB) - log2_det_hermitian(cov.R_AB);
}

double rate_no_eve_closed(const EffectiveStatistics& s) {
    const double M = s.M;
    const double u = M * s.p_u;
    return 2.0 * std::log2(u + s.sigma_u2) - std::log2(s.est_noise1) - std::log2(2.0 * u + s.sigma_n2) +
           (M - 1.0) * (2.0 * std::log2(s.sigma_u2) - std::log2(s.est_noise1) - std::log2(s.sigma_n2));
}

double rate_no_irs(const EffectiveStatistics& s) {
    const double M = s.M;
    return 2.0 * M * std::log2(s.sigma_u2) - M * std::log2(s.est_noise1 * s.sigma_n2);
}

double rate_reduction(double optimum_with_eve, double optimum_no_eve) {
    if (!(optimum_no_eve > 0.0)) {
        throw DomainError("rate reduction needs a positive no-Eve optimum");
    }
    return (optimum_with_eve - optimum_no_eve) / optimum_no_eve * 100.0;
}

std::array<ShiftedSpectrum, 4> predicted_spectra(const EffectiveStatistics& s) {
    const double M = s.M;
    const double pl2 = std::norm(s.p_l);
    return {{
        {s.sigma_u2, M * s.p_u + s.sigma_u2},
        {s.sigma_e2, M * s.p_e + s.sigma_e2},
        {s.sigma_e2, M * s.p_e + s.sigma_e2 - M * M * pl2 / (M * s.p_u + s.sigma_u2)},
        {s.sigma_n2, 2.0 * M * s.p_u + s.sigma_n2 - 2.0 * M * M * pl2 / (M * s.p_e + s.sigma_e2)},
    }};
}

std::array<CMatrix, 4> spectral_terms(const EffectiveStatistics& s, const CovarianceSet& cov) {
    const CMatrix I = CMatrix::Identity(s.M, s.M);
    const CMatrix T1 = cov.W_U + s.sigma_u2 * I;
    const CMatrix T2 = cov.W_E + s.sigma_e2 * I;
    const CMatrix T3 = T2 - cov.W_L.adjoint() * T1.ldlt().solve(cov.W_L);
    const CMatrix T4 = 2.0 * cov.W_U + s.sigma_n2 * I - 2.0 * cov.W_L * T2.ldlt().solve(cov.W_L.adjoint());
    return {hermitian_part(T1), hermitian_part(T2), hermitian_part(T3), hermitian_part(T4)};
}

KeyRateReport key_rate_report(const EffectiveStatistics& stats, const CMatrix& R_BS) {
    const CovarianceSet cov = covariance_set(stats, R_BS);
    KeyRateReport r;
    r.rate_closed = rate_closed(stats);
    r.rate_direct = rate_direct(cov);
    r.rate_no_irs = rate_no_irs(stats);
    r.rate_no_eve = rate_no_eve(cov);
    for (const CMatrix& term : spectral_terms(stats, cov)) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(term, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd& ev = eig.eigenvalues();
        r.eigenvalues.emplace_back(ev.data(), ev.data() + ev.size());
    }
    return r;
}

}  // namespace irskg
