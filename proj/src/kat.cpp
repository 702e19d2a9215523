#include "kem/kat.hpp"

#include <bit>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "kem/cipher_core.hpp"
#include "kem/digest_schedule.hpp"
#include "kem/hex.hpp"
#include "kem/memristor_image.hpp"
#include "kem/wire_protocol.hpp"

namespace kem {

namespace {

struct Vector {
    std::string_view id;
    std::string_view pw;
    std::array<std::uint8_t, 16> rn;
    std::uint64_t lut_seed;
    std::vector<std::uint8_t> plaintext;
};

std::vector<std::uint8_t> ascii(std::string_view s) {
    return {s.begin(), s.end()};
}

std::vector<std::uint8_t> doubles_be(const std::vector<double>& values) {
    std::vector<std::uint8_t> out;
    out.reserve(values.size() * 8);
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int shift = 56; shift >= 0; shift -= 8) {
            out.push_back(static_cast<std::uint8_t>(bits >> shift));
        }
    }
    return out;
}

void emit(std::ostream& out, const std::string& name, std::span<const std::uint8_t> value) {
    out << name << " = " << to_hex(value) << "\n";
}

void emit_vector(std::ostream& out, std::size_t index, const Vector& vec) {
    const std::string prefix = "vec" + std::to_string(index) + ".";
    out << "# vector " << index << "\n";

    Credentials cred;
    cred.id = normalize_credential(vec.id);
    cred.pw = normalize_credential(vec.pw);
    SessionNonce rn{vec.rn};

    emit(out, prefix + "id", ascii(vec.id));
    emit(out, prefix + "pw", ascii(vec.pw));
    emit(out, prefix + "id_norm", cred.id);
    emit(out, prefix + "pw_norm", cred.pw);
    emit(out, prefix + "rn", rn.bytes);

    std::array<std::uint8_t, 8> seed_be;
    for (int i = 0; i < 8; ++i) {
        seed_be[i] = static_cast<std::uint8_t>(vec.lut_seed >> (56 - 8 * i));
    }
    emit(out, prefix + "lut_seed", seed_be);
    emit(out, prefix + "plaintext", vec.plaintext);

    const auto seed = seed_digest(cred, rn);
    emit(out, prefix + "seed_digest", seed);
    const LongDigest lmd = build_long_digest(seed);
    emit(out, prefix + "long_digest", lmd.bytes);

    const NibbleSequence nibbles = to_nibbles(vec.plaintext);
    emit(out, prefix + "nibbles", nibbles);

    const auto selectors = extract_selectors(lmd, nibbles.size() + 1);
    std::vector<std::uint8_t> selector_triples;
    selector_triples.reserve(selectors.size() * 3);
    std::vector<double> resistances;
    resistances.reserve(selectors.size());
    const MemristorImage img = generate_image(vec.lut_seed);
    for (const CellSelector& sel : selectors) {
        selector_triples.push_back(sel.address);
        selector_triples.push_back(sel.current);
        selector_triples.push_back(sel.order);
        resistances.push_back(read_cell(img, sel));
    }
    emit(out, prefix + "selectors", selector_triples);
    emit(out, prefix + "resistances", doubles_be(resistances));

    const TransitCipher transit = encode_transit(nibbles, resistances);
    emit(out, prefix + "transit", doubles_be(transit.values));

    const FinalCipher final_cipher = encrypt_message(vec.plaintext, cred, rn, img);
    emit(out, prefix + "frame", encode_frame(rn, final_cipher));
}

} // namespace

void write_kat(std::ostream& out) {
    out << "# kem known-answer vectors\n";
    out << "# format: name = hexvalue\n";
    out << "# selectors: (address, current, order) byte triples\n";
    out << "# resistances/transit: big-endian IEEE-754 double bit patterns\n";
    out << "# frame: the wire frame for (rn, final cipher), no length prefix\n";

    std::vector<std::uint8_t> max_plaintext(119);
    for (std::size_t i = 0; i < max_plaintext.size(); ++i) {
        max_plaintext[i] = static_cast<std::uint8_t>((i * 31 + 7) & 0xFF);
    }

    const Vector vectors[] = {
        {"sensor-01", "correct horse battery staple",
         {0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
          0x08, 0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x0E, 0x0F},
         0,
         ascii("Keyless")},
        {"\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA"
         "\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA",
         "\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA"
         "\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA\xAA",
         {},
         1,
         {0x41}},
        {"device-B", "a password deliberately longer than thirty-two bytes",
         {0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF,
          0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF},
         0x0123456789ABCDEFULL,
         max_plaintext},
    };

    std::size_t index = 0;
    for (const Vector& vec : vectors) {
        emit_vector(out, index++, vec);
    }
}

} // namespace kem
