#pragma once

#include <iosfwd>

namespace kem {

/// Writes the known-answer vector file: fixed (id, pw, rn, seed64, plaintext)
/// tuples with the resulting long digest, selectors, nibbles, transit cipher,
/// and frame bytes, as line-oriented `name = hexvalue` records with '#'
/// comments. Deterministic byte-for-byte on every platform; serves as the
/// cross-language ground truth for this protocol.
void write_kat(std::ostream& out);

} // namespace kem
