#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace kem {

/// Normalized device identifier and shared password, 32 bytes each.
struct Credentials {
    std::array<std::uint8_t, 32> id{};
    std::array<std::uint8_t, 32> pw{};
};

/// Per-message random number, exchanged in clear during the handshake.
struct SessionNonce {
    std::array<std::uint8_t, 16> bytes{};

    friend bool operator==(const SessionNonce&, const SessionNonce&) = default;
};

/// 512-byte expanded digest: 16 concatenated SHA-256 outputs.
struct LongDigest {
    std::array<std::uint8_t, 512> bytes{};
};

/// One 17-bit slice of the long digest.
///   address: 7 bits, row in the memristor table
///   current: 3 bits, column (current level)
///   order:   7 bits, sort key for the cipher permutation
struct CellSelector {
    std::uint8_t address = 0; // [0,127]
    std::uint8_t current = 0; // [0,7]
    std::uint8_t order = 0;   // [0,127]

    friend bool operator==(const CellSelector&, const CellSelector&) = default;
};

/// floor(4096 / 17): number of selectors one long digest can supply.
inline constexpr std::size_t kSelectorBudget = 240;

/// Truncates to 32 bytes or right-pads with 0x00. Throws InvalidCredential
/// on empty input or input longer than 1024 bytes.
std::array<std::uint8_t, 32> normalize_credential(std::span<const std::uint8_t> raw);
std::array<std::uint8_t, 32> normalize_credential(std::string_view raw);

/// SHA-256 over the 48-byte message (id XOR pw) || rn.
std::array<std::uint8_t, 32> seed_digest(const Credentials& cred, const SessionNonce& rn);

/// Left rotation of a 16-bit value by k mod 16 positions.
constexpr std::uint16_t rotl16(std::uint16_t value, unsigned k) {
    k %= 16;
    if (k == 0) {
        return value;
    }
    return static_cast<std::uint16_t>((value << k) | (value >> (16 - k)));
}

/// Rotate-and-hash schedule. Let v0 be the big-endian 16-bit value in seed
/// bytes 0..1. Block i (i = 0..15) is SHA-256 of the seed with bytes 0..1
/// replaced by rotl16(v0, i), big-endian; block 0 hashes the seed unchanged.
LongDigest build_long_digest(const std::array<std::uint8_t, 32>& seed);

/// Slices the digest, viewed as an MSB-first bitstream, into 17-bit blocks:
/// bits 0-6 address, 7-9 current, 10-16 order. The trailing 16 bits of the
/// stream are never used. Throws SelectorBudgetExceeded when count > 240.
std::vector<CellSelector> extract_selectors(const LongDigest& lmd, std::size_t count);

} // namespace kem
