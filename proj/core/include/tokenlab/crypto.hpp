#pragma once

#include "tokenlab/bytes.hpp"
#include "tokenlab/rng.hpp"

namespace tokenlab::crypto {

inline constexpr size_t kPublicKeyBytes = 32;
inline constexpr size_t kSecretKeyBytes = 32; // Ed25519 seed form
inline constexpr size_t kSignatureBytes = 64;

/// SHA-256.
Digest hash(ByteSpan data);
Digest hash(const Bytes& data);
Digest hash(std::string_view data);

/// Ed25519 key pair, raw fixed-length encodings. The secret key is the
/// 32-byte seed; signing is deterministic, so a fixed key and message always
/// produce the same signature.
struct KeyPair {
    Bytes public_key; // 32 bytes
    Bytes secret_key; // 32 bytes
};

/// Key generation from caller-supplied randomness.
KeyPair generate_keypair(DetRng& rng);
KeyPair keypair_from_seed(ByteSpan seed32);

/// Detached signature, 64 bytes. Aborts only on malformed *secret* material,
/// which is a caller bug; message may be anything.
Bytes sign(ByteSpan secret_key, ByteSpan message);

/// Verification never aborts: malformed keys or signatures simply fail.
bool verify(ByteSpan public_key, ByteSpan message, ByteSpan signature);

} // namespace tokenlab::crypto
