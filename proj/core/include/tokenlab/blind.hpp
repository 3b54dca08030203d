#pragma once

#include <memory>

#include "tokenlab/bytes.hpp"
#include "tokenlab/result.hpp"
#include "tokenlab/rng.hpp"

namespace tokenlab::crypto {

/// RSA blind signatures with full-domain-hash encoding, following the
/// blind / blind_sign / unblind / verify flow. All encodings are raw
/// fixed-length big-endian byte strings of the modulus size; the public
/// exponent is fixed at 65537.
///
/// The issuer sees only the blinded message and the blind signature it
/// returns; the unblinded (message, signature) pair shares no bytes with
/// that view, which is what the private issuance modes build on.

/// What the issuer retains from one issuance. Contains neither the
/// unblinded message nor the unblinded signature.
struct BlindSignatureTranscript {
    Bytes blinded_message;
    Bytes blind_signature;
    Bytes issuer_key;
};

/// User-side output of blinding: the value to send and the state needed to
/// unblind the response. `unblinding` never leaves the user.
struct BlindingResult {
    Bytes blinded_message;
    Bytes unblinding;
};

class BlindSigner {
public:
    /// Deterministic key generation from caller randomness. modulus_bits
    /// trades desk-scale speed against margin; parameter hardening is out
    /// of scope here.
    static BlindSigner generate(DetRng& rng, int modulus_bits = 1024);

    BlindSigner(BlindSigner&&) noexcept;
    BlindSigner& operator=(BlindSigner&&) noexcept;
    ~BlindSigner();

    /// Modulus as a fixed-length big-endian byte string.
    const Bytes& public_key() const { return public_key_; }
    size_t signature_size() const { return public_key_.size(); }

    /// Signs a blinded message. Malformed input (wrong length, value out of
    /// range) is an explicit rejection, never a crash.
    Result<Bytes> blind_sign(ByteSpan blinded_message) const;

private:
    BlindSigner();
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Bytes public_key_;
};

/// Blind `message` for the issuer identified by `issuer_public`, drawing the
/// blinding factor from `rng`. Distinct calls give distinct blinded values
/// even for equal messages.
BlindingResult blind(ByteSpan message, ByteSpan issuer_public, DetRng& rng);

/// Remove the blinding factor. A mismatched `unblinding` yields a signature
/// that fails verification rather than an error.
Bytes unblind(ByteSpan blind_signature, ByteSpan unblinding, ByteSpan issuer_public);

/// Verify an unblinded signature over `message`. Never aborts.
bool blind_verify(ByteSpan issuer_public, ByteSpan message, ByteSpan signature);

} // namespace tokenlab::crypto
