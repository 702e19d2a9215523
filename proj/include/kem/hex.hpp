#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kem {

/// Lowercase hex encoding of a byte range.
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Decodes hex (upper or lower case). Returns nullopt on odd length or
/// non-hex characters.
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view text);

} // namespace kem
