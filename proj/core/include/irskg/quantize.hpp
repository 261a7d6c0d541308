#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "irskg/channel.hpp"

namespace irskg {

using Bits = std::vector<std::uint8_t>;  // one 0/1 value per entry

// Equiprobable cells of the standard Gaussian CDF with a guardband of
// probability mass `guardband` per cell, split across its two edges.
struct QuantizerSpec {
    int bits_per_dim = 4;
    double guardband = 0.1;  // delta in [0, 1)
};

struct KeyMaterial {
    int bits_per_dim = 0;
    Bits bits;                         // bits_per_dim Gray-coded bits per kept sample
    std::vector<std::size_t> kept;     // sorted sample positions that survived the guardband
};

// Throws PreconditionError on an invalid spec.
void validate(const QuantizerSpec& spec);

double standard_normal_cdf(double x);

unsigned gray_encode(unsigned cell);
unsigned gray_decode(unsigned label);

// Normalizes by the batch mean and standard deviation, then maps each sample to
// cell floor(Phi(x) 2^b). A sample whose Phi(x) lies within (delta / 2) 2^-b of
// a cell edge (0 and 1 included) is dropped. Throws PreconditionError for an
// empty batch and DegenerateInputError when all samples are equal.
KeyMaterial quantize(const std::vector<double>& samples, const QuantizerSpec& spec);

// Restricts both keys to the intersection of kept positions.
// Throws PreconditionError if the two sides used different bits_per_dim.
std::pair<Bits, Bits> reconcile_indices(const KeyMaterial& a, const KeyMaterial& b);

// Hamming distance / length. Throws PreconditionError on a length mismatch or
// empty input.
double bdr(const Bits& a, const Bits& b);

// Splits a batch of complex observations into real dimensions
// (Re x_0, Im x_0, Re x_1, ...); entry d holds that dimension across the batch.
std::vector<std::vector<double>> real_dimensions(const std::vector<CVector>& batch);

struct KeyAgreement {
    Bits bits_a;
    Bits bits_b;
    std::size_t samples = 0;  // batch size x real dimensions
    std::size_t kept = 0;     // positions kept at both parties
    double bdr = 0.0;         // NaN when nothing survived
    double kept_fraction = 0.0;
};

// Quantizes each real dimension of both parties' batches independently,
// reconciles per dimension and concatenates the keys dimension by dimension.
KeyAgreement agree_keys(const std::vector<CVector>& party_a, const std::vector<CVector>& party_b,
                        const QuantizerSpec& spec);

// Packs bits MSB-first into hex, zero-padding the final nibble.
std::string to_hex(const Bits& bits);

// Key dump line: "<label> <bit count> <hex>"
void write_key_line(std::ostream& out, const std::string& label, const Bits& bits);

}  // namespace irskg
