#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace kem {

/// SHA-256 (FIPS 180-4), streaming interface.
class Sha256 {
public:
    static constexpr std::size_t kDigestSize = 32;

    Sha256();

    void update(std::span<const std::uint8_t> data);
    std::array<std::uint8_t, kDigestSize> finish();

    /// One-shot convenience.
    static std::array<std::uint8_t, kDigestSize> hash(std::span<const std::uint8_t> data);

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::size_t buffered_;
    std::uint64_t total_bytes_;
};

} // namespace kem
