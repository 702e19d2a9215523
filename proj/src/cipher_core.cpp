#include "kem/cipher_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kem/errors.hpp"

namespace kem {

namespace {

// Largest residual tolerated between the inverse formula's output and the
// nearest nibble. Anything worse means tampering, wrong credentials, or a
// mismatched table rather than float drift.
constexpr double kResidualGuard = 0.25;

void check_permutation(std::span<const std::size_t> p) {
    std::vector<bool> seen(p.size(), false);
    for (std::size_t v : p) {
        if (v >= p.size() || seen[v]) {
            throw PermutationError("not a permutation of [0," + std::to_string(p.size()) + ")");
        }
        seen[v] = true;
    }
}

std::vector<double> resistances_for(const std::vector<CellSelector>& selectors,
                                    const MemristorImage& img) {
    std::vector<double> resistances;
    resistances.reserve(selectors.size());
    for (const CellSelector& sel : selectors) {
        resistances.push_back(read_cell(img, sel));
    }
    return resistances;
}

std::vector<std::uint8_t> orders_of(const std::vector<CellSelector>& selectors) {
    std::vector<std::uint8_t> orders;
    orders.reserve(selectors.size());
    for (const CellSelector& sel : selectors) {
        orders.push_back(sel.order);
    }
    return orders;
}

} // namespace

NibbleSequence to_nibbles(std::span<const std::uint8_t> plaintext) {
    if (plaintext.empty()) {
        throw EmptyPlaintext("plaintext must not be empty");
    }
    if (plaintext.size() > kMaxPlaintextBytes) {
        throw MessageTooLong("plaintext of " + std::to_string(plaintext.size()) +
                             " bytes exceeds the " + std::to_string(kMaxPlaintextBytes) +
                             "-byte limit");
    }
    NibbleSequence nibbles;
    nibbles.reserve(plaintext.size() * 2);
    for (std::uint8_t b : plaintext) {
        nibbles.push_back(static_cast<std::uint8_t>(b >> 4));
        nibbles.push_back(static_cast<std::uint8_t>(b & 0x0F));
    }
    return nibbles;
}

std::vector<std::uint8_t> from_nibbles(std::span<const std::uint8_t> nibbles) {
    if (nibbles.size() % 2 != 0) {
        throw NibbleRangeError("nibble count must be even");
    }
    std::vector<std::uint8_t> bytes;
    bytes.reserve(nibbles.size() / 2);
    for (std::size_t i = 0; i < nibbles.size(); i += 2) {
        if (nibbles[i] > 15 || nibbles[i + 1] > 15) {
            throw NibbleRangeError("nibble out of [0,15]");
        }
        bytes.push_back(static_cast<std::uint8_t>((nibbles[i] << 4) | nibbles[i + 1]));
    }
    return bytes;
}

TransitCipher encode_transit(std::span<const std::uint8_t> nibbles,
                             std::span<const double> resistances,
                             const CipherParams& params) {
    if (resistances.size() != nibbles.size() + 1) {
        throw SizeMismatch("need " + std::to_string(nibbles.size() + 1) + " resistances, got " +
                           std::to_string(resistances.size()));
    }
    TransitCipher transit;
    transit.values.reserve(resistances.size());
    transit.values.push_back(resistances[0] * params.calibration_factor);
    for (std::size_t i = 1; i < resistances.size(); ++i) {
        transit.values.push_back(resistances[i] * (1.0 + params.k * nibbles[i - 1]));
    }
    return transit;
}

std::vector<std::size_t> stable_order_permutation(std::span<const std::uint8_t> orders) {
    std::vector<std::size_t> p(orders.size());
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::stable_sort(p.begin(), p.end(),
                     [orders](std::size_t a, std::size_t b) { return orders[a] < orders[b]; });
    return p;
}

std::vector<double> apply_permutation(std::span<const double> values,
                                      std::span<const std::size_t> p) {
    if (values.size() != p.size()) {
        throw PermutationError("permutation length does not match value count");
    }
    check_permutation(p);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = values[p[i]];
    }
    return out;
}

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> p) {
    check_permutation(p);
    std::vector<std::size_t> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        q[p[i]] = i;
    }
    return q;
}

NibbleSequence decode_transit(const TransitCipher& transit,
                              std::span<const double> resistances,
                              const CipherParams& params) {
    if (transit.values.size() != resistances.size()) {
        throw SizeMismatch("transit cipher and resistance counts differ");
    }
    if (transit.values.empty()) {
        throw SizeMismatch("transit cipher is empty");
    }

    NibbleSequence nibbles;
    nibbles.reserve(transit.values.size() - 1);
    // Element 0 is the calibration element; it carries no plaintext.
    for (std::size_t i = 1; i < transit.values.size(); ++i) {
        const double q_hat = (transit.values[i] / resistances[i] - 1.0) / params.k;
        const double rounded = std::round(q_hat); // half away from zero
        if (!(std::fabs(q_hat - rounded) < kResidualGuard) || rounded < 0.0 || rounded > 15.0) {
            throw CorruptCipher("cipher value " + std::to_string(i) +
                                " is inconsistent with the local secrets");
        }
        nibbles.push_back(static_cast<std::uint8_t>(rounded));
    }
    return nibbles;
}

FinalCipher encrypt_message(std::span<const std::uint8_t> plaintext,
                            const Credentials& cred,
                            const SessionNonce& rn,
                            const MemristorImage& img) {
    const NibbleSequence nibbles = to_nibbles(plaintext);
    const LongDigest lmd = build_long_digest(seed_digest(cred, rn));
    const auto selectors = extract_selectors(lmd, nibbles.size() + 1);

    const TransitCipher transit = encode_transit(nibbles, resistances_for(selectors, img));
    const auto p = stable_order_permutation(orders_of(selectors));
    return FinalCipher{apply_permutation(transit.values, p)};
}

std::vector<std::uint8_t> decrypt_message(const FinalCipher& final_cipher,
                                          const Credentials& cred,
                                          const SessionNonce& rn,
                                          const MemristorImage& img) {
    const std::size_t count = final_cipher.values.size();
    if (count % 2 == 0 || count < 3 || count > kSelectorBudget) {
        throw MalformedCipher("cipher value count must be odd and in [3,240], got " +
                              std::to_string(count));
    }

    const LongDigest lmd = build_long_digest(seed_digest(cred, rn));
    const auto selectors = extract_selectors(lmd, count);

    const auto p = stable_order_permutation(orders_of(selectors));
    TransitCipher transit{apply_permutation(final_cipher.values, invert_permutation(p))};
    const NibbleSequence nibbles = decode_transit(transit, resistances_for(selectors, img));
    return from_nibbles(nibbles);
}

} // namespace kem
