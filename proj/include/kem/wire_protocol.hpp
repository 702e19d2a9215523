#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "kem/cipher_core.hpp"
#include "kem/digest_schedule.hpp"
#include "kem/memristor_image.hpp"

namespace kem {

/// Frame layout (all multi-byte fields big-endian):
///   magic   4 bytes  "KEM1"
///   version 1 byte   0x01
///   rn      16 bytes
///   count   u16      odd, in [3, 240]
///   values  count * 8 bytes, raw IEEE-754 double bit patterns
inline constexpr std::array<std::uint8_t, 4> kFrameMagic{0x4B, 0x45, 0x4D, 0x31};
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr std::size_t kFrameHeaderSize = 4 + 1 + 16 + 2;

enum class NonceMode { saved, provided, system };

/// saved    -> returns `saved` (NoSavedNonce when absent)
/// provided -> parses `hex`, exactly 32 hex chars (NonceFormatError otherwise)
/// system   -> 16 bytes from the OS cryptographic randomness source
SessionNonce new_nonce(NonceMode mode,
                       const std::optional<SessionNonce>& saved = std::nullopt,
                       std::string_view hex = {});

std::vector<std::uint8_t> encode_frame(const SessionNonce& rn, const FinalCipher& final_cipher);

/// Parses and validates a frame. Throws WrongProtocol, UnsupportedVersion,
/// MalformedFrame (bad count or truncated body), CorruptFrame (non-finite
/// or non-positive value).
std::pair<SessionNonce, FinalCipher> decode_frame(std::span<const std::uint8_t> bytes);

/// A reliable ordered byte channel. One logical stream belongs to one
/// logical task at a time; concurrent sessions use independent streams.
class ByteStream {
public:
    virtual ~ByteStream() = default;

    /// Fills `out` completely or throws TransportError (EOF counts as failure).
    virtual void read_exact(std::span<std::uint8_t> out) = 0;
    virtual void write_all(std::span<const std::uint8_t> data) = 0;
};

/// Draws a system nonce, encrypts, writes one length-prefixed frame
/// (u32 big-endian prefix = frame byte count). Returns the nonce used.
SessionNonce send_message(ByteStream& stream,
                          std::span<const std::uint8_t> plaintext,
                          const Credentials& cred,
                          const MemristorImage& img);

/// Reads one length-prefixed frame and decrypts it with the frame's nonce
/// and the locally held credentials and image.
std::vector<std::uint8_t> receive_message(ByteStream& stream,
                                          const Credentials& cred,
                                          const MemristorImage& img);

} // namespace kem
