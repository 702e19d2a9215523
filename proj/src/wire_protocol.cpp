#include "kem/wire_protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include <sys/random.h>

#include "kem/errors.hpp"
#include "kem/hex.hpp"

namespace kem {

namespace {

void put_u16_be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

std::uint64_t get_u64_be(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v = (v << 8) | p[i];
    }
    return v;
}

} // namespace

SessionNonce new_nonce(NonceMode mode, const std::optional<SessionNonce>& saved, std::string_view hex) {
    switch (mode) {
    case NonceMode::saved:
        if (!saved) {
            throw NoSavedNonce("no session nonce on record");
        }
        return *saved;
    case NonceMode::provided: {
        if (hex.size() != 32) {
            throw NonceFormatError("nonce must be exactly 32 hex characters, got " +
                                   std::to_string(hex.size()));
        }
        const auto bytes = from_hex(hex);
        if (!bytes) {
            throw NonceFormatError("nonce contains non-hex characters");
        }
        SessionNonce rn;
        std::copy(bytes->begin(), bytes->end(), rn.bytes.begin());
        return rn;
    }
    case NonceMode::system: {
        SessionNonce rn;
        if (getentropy(rn.bytes.data(), rn.bytes.size()) != 0) {
            throw Error("system randomness source unavailable");
        }
        return rn;
    }
    }
    throw Error("unreachable nonce mode");
}

std::vector<std::uint8_t> encode_frame(const SessionNonce& rn, const FinalCipher& final_cipher) {
    std::vector<std::uint8_t> frame;
    frame.reserve(kFrameHeaderSize + 8 * final_cipher.values.size());

    frame.insert(frame.end(), kFrameMagic.begin(), kFrameMagic.end());
    frame.push_back(kFrameVersion);
    frame.insert(frame.end(), rn.bytes.begin(), rn.bytes.end());
    put_u16_be(frame, static_cast<std::uint16_t>(final_cipher.values.size()));
    for (double v : final_cipher.values) {
        put_u64_be(frame, std::bit_cast<std::uint64_t>(v));
    }
    return frame;
}

std::pair<SessionNonce, FinalCipher> decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFrameHeaderSize) {
        throw MalformedFrame("frame shorter than its header");
    }
    if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), bytes.begin())) {
        throw WrongProtocol("bad frame magic");
    }
    if (bytes[4] != kFrameVersion) {
        throw UnsupportedVersion("unsupported frame version " + std::to_string(bytes[4]));
    }

    SessionNonce rn;
    std::copy(bytes.begin() + 5, bytes.begin() + 21, rn.bytes.begin());

    const std::size_t count = (std::size_t{bytes[21]} << 8) | bytes[22];
    if (count % 2 == 0 || count < 3 || count > kSelectorBudget) {
        throw MalformedFrame("value count must be odd and in [3,240], got " + std::to_string(count));
    }
    if (bytes.size() != kFrameHeaderSize + 8 * count) {
        throw MalformedFrame("frame length does not match its value count");
    }

    FinalCipher cipher;
    cipher.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = std::bit_cast<double>(get_u64_be(bytes.data() + kFrameHeaderSize + 8 * i));
        if (!std::isfinite(v) || v <= 0.0) {
            throw CorruptFrame("cipher value " + std::to_string(i) + " is not finite and positive");
        }
        cipher.values.push_back(v);
    }
    return {rn, std::move(cipher)};
}

SessionNonce send_message(ByteStream& stream,
                          std::span<const std::uint8_t> plaintext,
                          const Credentials& cred,
                          const MemristorImage& img) {
    const SessionNonce rn = new_nonce(NonceMode::system);
    const auto frame = encode_frame(rn, encrypt_message(plaintext, cred, rn, img));

    std::uint8_t prefix[4];
    const auto len = static_cast<std::uint32_t>(frame.size());
    for (int i = 0; i < 4; ++i) {
        prefix[i] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
    }
    stream.write_all(prefix);
    stream.write_all(frame);
    return rn;
}

std::vector<std::uint8_t> receive_message(ByteStream& stream,
                                          const Credentials& cred,
                                          const MemristorImage& img) {
    std::uint8_t prefix[4];
    stream.read_exact(prefix);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) {
        len = (len << 8) | prefix[i];
    }
    // Largest legal frame is 23 + 8*239 bytes; anything bigger is garbage.
    if (len < kFrameHeaderSize || len > kFrameHeaderSize + 8 * kSelectorBudget) {
        throw MalformedFrame("frame length prefix out of range: " + std::to_string(len));
    }

    std::vector<std::uint8_t> frame(len);
    stream.read_exact(frame);
    auto [rn, cipher] = decode_frame(frame);
    return decrypt_message(cipher, cred, rn, img);
}

} // namespace kem
