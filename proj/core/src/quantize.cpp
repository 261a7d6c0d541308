#include "irskg/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "irskg/errors.hpp"

namespace irskg {

void validate(const QuantizerSpec& spec) {
    if (spec.bits_per_dim < 1 || spec.bits_per_dim > 16) {
        throw PreconditionError("bits_per_dim must be in [1, 16], got " + std::to_string(spec.bits_per_dim));
    }
    if (!(spec.guardband >= 0.0 && spec.guardband < 1.0)) {
        throw PreconditionError("guardband must be in [0, 1)");
    }
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

unsigned gray_encode(unsigned cell) { return cell ^ (cell >> 1); }

unsigned gray_decode(unsigned label) {
    unsigned cell = label;
    for (unsigned shift = label >> 1; shift != 0; shift >>= 1) {
        cell ^= shift;
    }
    return cell;
}

KeyMaterial quantize(const std::vector<double>& samples, const QuantizerSpec& spec) {
    validate(spec);
    if (samples.empty()) {
        throw PreconditionError("quantize needs at least one sample");
    }
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double s : samples) {
        mean += s;
    }
    mean /= n;
    double var = 0.0;
    for (double s : samples) {
        var += (s - mean) * (s - mean);
    }
    var /= n;
    const double sd = std::sqrt(var);
    if (!(sd > std::abs(mean) * 1e-12) || !(sd > 0.0)) {
        throw DegenerateInputError("cannot normalize a batch with zero variance");
    }

    const unsigned cells = 1u << spec.bits_per_dim;
    const double width = 1.0 / cells;
    const double half_guard = 0.5 * spec.guardband * width;

    KeyMaterial key;
    key.bits_per_dim = spec.bits_per_dim;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double u = standard_normal_cdf((samples[i] - mean) / sd);
        const double scaled = u * cells;
        const unsigned cell = std::min(static_cast<unsigned>(scaled), cells - 1);
        const double offset = u - cell * width;
        if (offset < half_guard || width - offset < half_guard) {
            continue;
        }
        key.kept.push_back(i);
        const unsigned label = gray_encode(cell);
        for (int b = spec.bits_per_dim - 1; b >= 0; --b) {
            key.bits.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
        }
    }
    return key;
}

std::pair<Bits, Bits> reconcile_indices(const KeyMaterial& a, const KeyMaterial& b) {
    if (a.bits_per_dim != b.bits_per_dim) {
        throw PreconditionError("keys were quantized with different bits_per_dim");
    }
    const std::size_t w = static_cast<std::size_t>(a.bits_per_dim);
    std::pair<Bits, Bits> out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.kept.size() && j < b.kept.size()) {
        if (a.kept[i] < b.kept[j]) {
            ++i;
        } else if (b.kept[j] < a.kept[i]) {
            ++j;
        } else {
            out.first.insert(out.first.end(), a.bits.begin() + i * w, a.bits.begin() + (i + 1) * w);
            out.second.insert(out.second.end(), b.bits.begin() + j * w, b.bits.begin() + (j + 1) * w);
            ++i;
            ++j;
        }
    }
    return out;
}

double bdr(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) {
        throw PreconditionError("bit strings differ in length");
    }
    if (a.empty()) {
        throw PreconditionError("bit disagreement ratio of empty strings");
    }
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] != b[i]) ? 1 : 0;
    }
    return static_cast<double>(diff) / static_cast<double>(a.size());
}

std::vector<std::vector<double>> real_dimensions(const std::vector<CVector>& batch) {
    if (batch.empty()) {
        return {};
    }
    const Eigen::Index M = batch.front().size();
    std::vector<std::vector<double>> dims(static_cast<std::size_t>(2 * M));
    for (auto& d : dims) {
        d.reserve(batch.size());
    }
    for (const CVector& x : batch) {
        if (x.size() != M) {
            throw PreconditionError("observation sizes differ across the batch");
        }
        for (Eigen::Index m = 0; m < M; ++m) {
            dims[2 * m].push_back(x[m].real());
            dims[2 * m + 1].push_back(x[m].imag());
        }
    }
    return dims;
}

KeyAgreement agree_keys(const std::vector<CVector>& party_a, const std::vector<CVector>& party_b,
                        const QuantizerSpec& spec) {
    if (party_a.size() != party_b.size()) {
        throw PreconditionError("both parties need the same number of observations");
    }
    const auto dims_a = real_dimensions(party_a);
    const auto dims_b = real_dimensions(party_b);
    if (dims_a.size() != dims_b.size()) {
        throw PreconditionError("observation sizes differ between the parties");
    }
    KeyAgreement out;
    for (std::size_t d = 0; d < dims_a.size(); ++d) {
        const auto [ka, kb] = reconcile_indices(quantize(dims_a[d], spec), quantize(dims_b[d], spec));
        out.bits_a.insert(out.bits_a.end(), ka.begin(), ka.end());
        out.bits_b.insert(out.bits_b.end(), kb.begin(), kb.end());
        out.samples += dims_a[d].size();
    }
    out.kept = out.bits_a.size() / static_cast<std::size_t>(spec.bits_per_dim);
    out.kept_fraction = out.samples ? static_cast<double>(out.kept) / out.samples : 0.0;
    out.bdr = out.bits_a.empty() ? std::numeric_limits<double>::quiet_NaN() : bdr(out.bits_a, out.bits_b);
    return out;
}

std::string to_hex(const Bits& bits) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        unsigned nibble = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            nibble <<= 1;
            if (i + k < bits.size()) {
                nibble |= bits[i + k] & 1u;
            }
        }
        out.push_back(digits[nibble]);
    }
    return out;
}

void write_key_line(std::ostream& out, const std::string& label, const Bits& bits) {
    out << label << ' ' << bits.size() << ' ' << to_hex(bits) << '\n';
}

}  // namespace irskg
