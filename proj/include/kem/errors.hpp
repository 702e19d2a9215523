#pragma once

#include <stdexcept>
#include <string>

namespace kem {

/// Base class for every error this library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// digest_schedule
class InvalidCredential : public Error { public: using Error::Error; };
class SelectorBudgetExceeded : public Error { public: using Error::Error; };

// memristor_image
class ImageIoError : public Error { public: using Error::Error; };
class ImageFormatError : public Error { public: using Error::Error; };
class ImageValueError : public Error { public: using Error::Error; };

// cipher_core
class EmptyPlaintext : public Error { public: using Error::Error; };
class MessageTooLong : public Error { public: using Error::Error; };
class NibbleRangeError : public Error { public: using Error::Error; };
class SizeMismatch : public Error { public: using Error::Error; };
class PermutationError : public Error { public: using Error::Error; };

/// Decryption produced a value that cannot come from a well-formed cipher
/// under the local credentials, nonce, and lookup table. Signals tampering,
/// a wrong password, a wrong nonce, or a mismatched table.
class CorruptCipher : public Error { public: using Error::Error; };
class MalformedCipher : public Error { public: using Error::Error; };

// wire_protocol
class WrongProtocol : public Error { public: using Error::Error; };
class UnsupportedVersion : public Error { public: using Error::Error; };
class MalformedFrame : public Error { public: using Error::Error; };
class CorruptFrame : public Error { public: using Error::Error; };
class NonceFormatError : public Error { public: using Error::Error; };
class NoSavedNonce : public Error { public: using Error::Error; };
class TransportError : public Error { public: using Error::Error; };

// cli / file plumbing
class IoError : public Error { public: using Error::Error; };

} // namespace kem
