#include "tokenlab/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <memory>
#include <stdexcept>

namespace tokenlab::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct CtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

} // namespace

Digest hash(ByteSpan data) {
    Digest d;
    SHA256(data.data(), data.size(), d.bytes.data());
    return d;
}

Digest hash(const Bytes& data) {
    return hash(ByteSpan(data.data(), data.size()));
}

Digest hash(std::string_view data) {
    return hash(ByteSpan(reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

KeyPair keypair_from_seed(ByteSpan seed32) {
    if (seed32.size() != kSecretKeyBytes) {
        throw std::invalid_argument("ed25519 seed must be 32 bytes");
    }
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                             seed32.data(), seed32.size()));
    if (!key) throw std::runtime_error("ed25519 key derivation failed");

    KeyPair kp;
    kp.secret_key.assign(seed32.begin(), seed32.end());
    kp.public_key.resize(kPublicKeyBytes);
    size_t len = kp.public_key.size();
    if (EVP_PKEY_get_raw_public_key(key.get(), kp.public_key.data(), &len) != 1 ||
        len != kPublicKeyBytes) {
        throw std::runtime_error("ed25519 public key extraction failed");
    }
    return kp;
}

KeyPair generate_keypair(DetRng& rng) {
    Bytes seed = rng.bytes(kSecretKeyBytes);
    return keypair_from_seed(seed);
}

Bytes sign(ByteSpan secret_key, ByteSpan message) {
    if (secret_key.size() != kSecretKeyBytes) {
        throw std::invalid_argument("bad secret key length");
    }
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                             secret_key.data(), secret_key.size()));
    if (!key) throw std::runtime_error("ed25519 key derivation failed");

    CtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        throw std::runtime_error("ed25519 sign init failed");
    }
    Bytes sig(kSignatureBytes);
    size_t len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1 ||
        len != kSignatureBytes) {
        throw std::runtime_error("ed25519 signing failed");
    }
    return sig;
}

bool verify(ByteSpan public_key, ByteSpan message, ByteSpan signature) {
    if (public_key.size() != kPublicKeyBytes) return false;
    if (signature.size() != kSignatureBytes) return false;

    PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                            public_key.data(), public_key.size()));
    if (!key) return false;

    CtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            message.data(), message.size()) == 1;
}

} // namespace tokenlab::crypto
