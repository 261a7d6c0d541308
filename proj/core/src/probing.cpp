#include "irskg/probing.hpp"

#include <cmath>
#include <string>

#include "irskg/errors.hpp"

namespace irskg {

namespace {

constexpr std::uint64_t kProbeStream = 0x70726f6265ULL;

void check_phases(const CVector& v, Eigen::Index elements) {
    if (v.size() != elements) {
        throw PreconditionError("phase vector has " + std::to_string(v.size()) + " entries, IRS has " +
                                std::to_string(elements));
    }
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        if (std::abs(std::abs(v[n]) - 1.0) > 1e-9) {
            throw PreconditionError("phase vector entry " + std::to_string(n) + " is not unit-modulus");
        }
    }
}

CVector gaussian_vector(Eigen::Index n, double variance, Rng& rng) {
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = complex_gaussian(rng, variance);
    }
    return out;
}

CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng) {
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            out(i, j) = complex_gaussian(rng, variance);
        }
    }
    return out;
}

}  // namespace

CMatrix orthogonal_pilot(int rows, int length) {
    if (rows < 1 || length < rows) {
        throw PreconditionError("pilot of length " + std::to_string(length) + " cannot carry " +
                                std::to_string(rows) + " orthogonal rows");
    }
    CMatrix S(rows, length);
    const double norm = 1.0 / std::sqrt(static_cast<double>(length));
    for (int m = 0; m < rows; ++m) {
        for (int t = 0; t < length; ++t) {
            S(m, t) = std::polar(norm, -2.0 * kPi * m * t / length);
        }
    }
    return S;
}

EffectiveChannels effective_channels(const ChannelRealization& r, const CVector& v) {
    check_phases(v, r.R_U.rows());
    return {r.h_ab + r.R_U.transpose() * v, r.h_ae + r.R_E.transpose() * v};
}

ObservationTriple probe(const ChannelRealization& realization, const CVector& v, const Scenario& scenario,
                        const PilotConfig& pilot, Rng& rng) {
    const EffectiveChannels h = effective_channels(realization, v);
    const Eigen::Index M = h.to_ut.size();
    ObservationTriple out;
    if (pilot.mode == PilotMode::kEquivalentNoise) {
        const double n1 = scenario.est_noise1();
        const double n2 = scenario.est_noise2();
        out.H_A = h.to_ut + gaussian_vector(M, n1, rng);
        out.H_B = h.to_ut + gaussian_vector(M, n1, rng);
        out.H_E = h.to_eve + gaussian_vector(M, n2, rng);
        return out;
    }

    const CMatrix S_dl = orthogonal_pilot(static_cast<int>(M), pilot.downlink_length);
    const CMatrix S_ul = orthogonal_pilot(1, pilot.uplink_length);
    const double root_p = std::sqrt(scenario.tx_power_w);

    // Downlink: the BS broadcasts S_dl; UT and Eve apply LS.
    const Eigen::RowVectorXcd y_ut =
        root_p * h.to_ut.transpose() * S_dl + gaussian_matrix(1, S_dl.cols(), scenario.noise1_w, rng);
    const Eigen::RowVectorXcd y_eve =
        root_p * h.to_eve.transpose() * S_dl + gaussian_matrix(1, S_dl.cols(), scenario.noise2_w, rng);
    out.H_A = ((y_ut * S_dl.adjoint()) / root_p).transpose();
    out.H_E = ((y_eve * S_dl.adjoint()) / root_p).transpose();

    // Uplink: the UT sends S_ul through the reciprocal channel.
    const CMatrix Y_bs = root_p * h.to_ut * S_ul + gaussian_matrix(M, S_ul.cols(), scenario.noise1_w, rng);
    out.H_B = (Y_bs * S_ul.adjoint()) / root_p;
    return out;
}

ChannelRealization fresh_fading(const Scenario& scenario, const ChannelGains& base, Rng& rng) {
    ChannelGains g = base;
    g.alpha_q = std::polar(std::abs(base.alpha_q), uniform_phase(rng));
    return realization_with_gains(scenario, g, rng);
}

std::vector<ObservationTriple> simulate_probes(const Scenario& scenario, const ChannelGains& base,
                                               const CVector& v, const PilotConfig& pilot, int trials,
                                               std::uint64_t seed) {
    if (trials < 0) {
        throw PreconditionError("trial count must be non-negative");
    }
    std::vector<ObservationTriple> out;
    out.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, kProbeStream, static_cast<std::uint64_t>(t)));
        const ChannelRealization r = fresh_fading(scenario, base, rng);
        out.push_back(probe(r, v, scenario, pilot, rng));
    }
    return out;
}

CovarianceSet empirical_covariances(const std::vector<ObservationTriple>& trials) {
    if (trials.size() < static_cast<std::size_t>(kMinCovarianceTrials)) {
        throw PreconditionError("empirical covariances need at least " + std::to_string(kMinCovarianceTrials) +
                                " trials, got " + std::to_string(trials.size()));
    }
    const Eigen::Index M = trials.front().H_A.size();
    CMatrix acc = CMatrix::Zero(3 * M, 3 * M);
    CVector stacked(3 * M);
    for (const ObservationTriple& o : trials) {
        if (o.H_A.size() != M || o.H_B.size() != M || o.H_E.size() != M) {
            throw PreconditionError("observation sizes differ across trials");
        }
        stacked << o.H_A, o.H_B, o.H_E;
        acc.selfadjointView<Eigen::Lower>().rankUpdate(stacked);
    }
    CMatrix R = acc.selfadjointView<Eigen::Lower>();
    R /= static_cast<double>(trials.size());

    CovarianceSet c;
    c.R_ABE = R;
    c.K_AA = R.block(0, 0, M, M);
    c.K_BB = R.block(M, M, M, M);
    c.K_EE = R.block(2 * M, 2 * M, M, M);
    c.K_AB = R.block(0, M, M, M);
    c.K_AE = R.block(0, 2 * M, M, M);
    c.K_BE = R.block(M, 2 * M, M, M);
    c.W_L = c.K_AE;
    c.R_E = c.K_EE;
    c.R_AB = R.topLeftCorner(2 * M, 2 * M);
    c.R_BE = R.bottomRightCorner(2 * M, 2 * M);
    c.R_AE.resize(2 * M, 2 * M);
    c.R_AE << c.K_AA, c.K_AE, c.K_AE.adjoint(), c.K_EE;
    return c;
}

double frobenius_relative(const CMatrix& A, const CMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw PreconditionError("matrix sizes differ");
    }
    const double denom = B.norm();
    if (!(denom > 0.0)) {
        throw DegenerateInputError("reference matrix is zero");
    }
    return (A - B).norm() / denom;
}

}  // namespace irskg
