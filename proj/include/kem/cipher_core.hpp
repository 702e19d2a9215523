#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kem/digest_schedule.hpp"
#include "kem/memristor_image.hpp"

namespace kem {

/// 4-bit plaintext blocks, high nibble of each byte first.
using NibbleSequence = std::vector<std::uint8_t>;

/// Pre-permutation cipher values. Element 0 is the calibration element
/// (carries no plaintext); length is 2n+1 for an n-byte plaintext.
struct TransitCipher {
    std::vector<double> values;
};

/// The transit cipher reordered by the order array; the transmitted payload.
struct FinalCipher {
    std::vector<double> values;

    friend bool operator==(const FinalCipher&, const FinalCipher&) = default;
};

struct CipherParams {
    double k = 0.2;
    double calibration_factor = 2.5; // 1 + 7.5 * k
};

/// 2*119 + 1 = 239 transit values fit the 240-selector budget; 120 bytes do not.
inline constexpr std::size_t kMaxPlaintextBytes = 119;

/// Throws EmptyPlaintext / MessageTooLong outside 1..119 bytes.
NibbleSequence to_nibbles(std::span<const std::uint8_t> plaintext);

/// Inverse of to_nibbles. Throws NibbleRangeError on elements > 15 or odd length.
std::vector<std::uint8_t> from_nibbles(std::span<const std::uint8_t> nibbles);

/// values[0] = resistances[0] * calibration_factor;
/// values[i] = resistances[i] * (1 + k * nibbles[i-1]) for i >= 1.
/// Requires resistances.size() == nibbles.size() + 1 (throws SizeMismatch).
TransitCipher encode_transit(std::span<const std::uint8_t> nibbles,
                             std::span<const double> resistances,
                             const CipherParams& params = {});

/// Stable argsort: orders[p[0]] <= orders[p[1]] <= ..., ties broken by
/// original index ascending. Duplicate orders are common (7-bit values over
/// up to 240 blocks), so stability is load-bearing, not cosmetic.
std::vector<std::size_t> stable_order_permutation(std::span<const std::uint8_t> orders);

/// out[i] = values[p[i]]. Throws PermutationError on malformed p.
std::vector<double> apply_permutation(std::span<const double> values,
                                      std::span<const std::size_t> p);

/// q with q[p[i]] = i. Throws PermutationError on malformed p.
std::vector<std::size_t> invert_permutation(std::span<const std::size_t> p);

/// Inverse formula q = (value/resistance - 1)/k per element, skipping the
/// calibration element. Each q must round (half away from zero) to a nibble
/// in [0,15] with residual < 0.25, otherwise CorruptCipher.
NibbleSequence decode_transit(const TransitCipher& transit,
                              std::span<const double> resistances,
                              const CipherParams& params = {});

/// Full pipeline: selectors from the long digest, resistances from the
/// image, transit encoding, then the stable order permutation (the
/// calibration element participates in the permutation).
FinalCipher encrypt_message(std::span<const std::uint8_t> plaintext,
                            const Credentials& cred,
                            const SessionNonce& rn,
                            const MemristorImage& img);

/// Inverse pipeline. Throws MalformedCipher when the value count is even or
/// outside [3,240]; CorruptCipher when the values are inconsistent with the
/// local credentials, nonce, or image.
std::vector<std::uint8_t> decrypt_message(const FinalCipher& final_cipher,
                                          const Credentials& cred,
                                          const SessionNonce& rn,
                                          const MemristorImage& img);

} // namespace kem
