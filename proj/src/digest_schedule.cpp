#include "kem/digest_schedule.hpp"

#include <string_view>

#include "kem/errors.hpp"
#include "kem/sha256.hpp"

namespace kem {

std::array<std::uint8_t, 32> normalize_credential(std::span<const std::uint8_t> raw) {
    if (raw.empty()) {
        throw InvalidCredential("credential must not be empty");
    }
    if (raw.size() > 1024) {
        throw InvalidCredential("credential longer than 1024 bytes");
    }
    std::array<std::uint8_t, 32> out{};
    const std::size_t n = std::min<std::size_t>(raw.size(), out.size());
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = raw[i];
    }
    return out;
}

std::array<std::uint8_t, 32> normalize_credential(std::string_view raw) {
    return normalize_credential(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

std::array<std::uint8_t, 32> seed_digest(const Credentials& cred, const SessionNonce& rn) {
    std::array<std::uint8_t, 48> message;
    for (std::size_t i = 0; i < 32; ++i) {
        message[i] = static_cast<std::uint8_t>(cred.id[i] ^ cred.pw[i]);
    }
    for (std::size_t i = 0; i < 16; ++i) {
        message[32 + i] = rn.bytes[i];
    }
    return Sha256::hash(message);
}

LongDigest build_long_digest(const std::array<std::uint8_t, 32>& seed) {
    const std::uint16_t v0 = static_cast<std::uint16_t>((std::uint16_t{seed[0]} << 8) | seed[1]);

    LongDigest lmd;
    std::array<std::uint8_t, 32> message = seed;
    for (unsigned i = 0; i < 16; ++i) {
        const std::uint16_t rotated = rotl16(v0, i);
        message[0] = static_cast<std::uint8_t>(rotated >> 8);
        message[1] = static_cast<std::uint8_t>(rotated & 0xFF);
        const auto block = Sha256::hash(message);
        std::copy(block.begin(), block.end(), lmd.bytes.begin() + i * 32);
    }
    return lmd;
}

std::vector<CellSelector> extract_selectors(const LongDigest& lmd, std::size_t count) {
    if (count > kSelectorBudget) {
        throw SelectorBudgetExceeded("requested " + std::to_string(count) +
                                     " selectors, budget is " + std::to_string(kSelectorBudget));
    }

    // MSB-first bit at stream position i.
    const auto bit_at = [&lmd](std::size_t i) -> unsigned {
        return (lmd.bytes[i >> 3] >> (7 - (i & 7))) & 1U;
    };

    std::vector<CellSelector> selectors;
    selectors.reserve(count);
    for (std::size_t block = 0; block < count; ++block) {
        const std::size_t base = block * 17;
        std::uint32_t bits = 0;
        for (std::size_t j = 0; j < 17; ++j) {
            bits = (bits << 1) | bit_at(base + j);
        }
        CellSelector sel;
        sel.address = static_cast<std::uint8_t>(bits >> 10);         // bits 0-6
        sel.current = static_cast<std::uint8_t>((bits >> 7) & 0x7);  // bits 7-9
        sel.order = static_cast<std::uint8_t>(bits & 0x7F);          // bits 10-16
        selectors.push_back(sel);
    }
    return selectors;
}

} // namespace kem
