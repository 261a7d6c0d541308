#pragma once

#include <cstdint>
#include <vector>

#include "irskg/channel.hpp"
#include "irskg/keyrate.hpp"
#include "irskg/scenario.hpp"

namespace irskg {

enum class PilotMode {
    kEquivalentNoise,  // effective channel plus the post-LS noise, drawn directly
    kExplicit,         // pilot transmission and least-squares estimation
};

struct PilotConfig {
    int downlink_length = 8;  // T_D
    int uplink_length = 8;    // T_U
    PilotMode mode = PilotMode::kEquivalentNoise;
};

// rows x length with S S^H = I: the first `rows` rows of the unitary DFT matrix
// of size `length`. Throws PreconditionError if length < rows.
CMatrix orthogonal_pilot(int rows, int length);

struct ObservationTriple {
    CVector H_A;  // UT's downlink estimate
    CVector H_B;  // BS's uplink estimate
    CVector H_E;  // Eve's downlink estimate
};

struct EffectiveChannels {
    CVector to_ut;   // h_AB^T + R_U^T v
    CVector to_eve;  // h_AE^T + R_E^T v
};

// Throws PreconditionError on a non-unit-modulus v or a size mismatch.
EffectiveChannels effective_channels(const ChannelRealization& realization, const CVector& v);

// One probing round. Explicit mode throws PreconditionError if T_D or T_U < M.
ObservationTriple probe(const ChannelRealization& realization, const CVector& v, const Scenario& scenario,
                        const PilotConfig& pilot, Rng& rng);

// Fresh fading for one trial: new direct links and a uniformly redrawn phase of
// alpha_q; the magnitudes of the cascaded gains and the phases of alpha_gu and
// alpha_ge are kept. The second moments E{H_x H_y^H} then equal covariance_set
// evaluated at `base`.
ChannelRealization fresh_fading(const Scenario& scenario, const ChannelGains& base, Rng& rng);

// `trials` independent probing rounds; trial t uses derive_seed(seed, stream, t).
std::vector<ObservationTriple> simulate_probes(const Scenario& scenario, const ChannelGains& base,
                                               const CVector& v, const PilotConfig& pilot, int trials,
                                               std::uint64_t seed);

inline constexpr int kMinCovarianceTrials = 1000;

// Sample second moments (1/N) sum H_x H_y^H of the stacked observations. K and
// stacked R blocks are filled, W_L = K_AE; W_U and W_E are left empty because
// separating them from the direct links needs the link variances. Throws
// PreconditionError for fewer than kMinCovarianceTrials trials.
CovarianceSet empirical_covariances(const std::vector<ObservationTriple>& trials);

// ||A - B||_F / ||B||_F
double frobenius_relative(const CMatrix& A, const CMatrix& B);

}  // namespace irskg
