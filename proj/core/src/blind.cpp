#include "tokenlab/blind.hpp"

#include <openssl/bn.h>
#include <openssl/sha.h>

#include <stdexcept>

#include "tokenlab/crypto.hpp"

namespace tokenlab::crypto {

namespace {

constexpr unsigned long kPublicExponent = 65537;

struct BnDeleter {
    void operator()(BIGNUM* b) const { BN_free(b); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtx = std::unique_ptr<BN_CTX, BnCtxDeleter>;

Bn make_bn() {
    Bn b(BN_new());
    if (!b) throw std::runtime_error("BN_new failed");
    return b;
}

Bn bn_from_bytes(ByteSpan data) {
    Bn b(BN_bin2bn(data.data(), static_cast<int>(data.size()), nullptr));
    if (!b) throw std::runtime_error("BN_bin2bn failed");
    return b;
}

Bytes bn_to_fixed(const BIGNUM* b, size_t len) {
    Bytes out(len);
    if (BN_bn2binpad(b, out.data(), static_cast<int>(len)) < 0) {
        throw std::runtime_error("BN_bn2binpad failed");
    }
    return out;
}

/// Draw a prime of `bits` bits with the top two bits set, candidates taken
/// from the caller's deterministic stream.
Bn draw_prime(DetRng& rng, int bits, const BIGNUM* e, BN_CTX* ctx) {
    const size_t len = static_cast<size_t>(bits) / 8;
    Bn tmp = make_bn();
    for (;;) {
        Bytes cand = rng.bytes(len);
        cand[0] |= 0xc0; // top two bits: product keeps full width
        cand[len - 1] |= 0x01;
        Bn p = bn_from_bytes(cand);
        int is_prime = BN_check_prime(p.get(), ctx, nullptr);
        if (is_prime < 0) throw std::runtime_error("BN_check_prime failed");
        if (is_prime != 1) continue;
        // need gcd(e, p-1) == 1 for the exponent to invert
        if (BN_sub(tmp.get(), p.get(), BN_value_one()) != 1) {
            throw std::runtime_error("BN_sub failed");
        }
        Bn g = make_bn();
        if (BN_gcd(g.get(), tmp.get(), e, ctx) != 1) {
            throw std::runtime_error("BN_gcd failed");
        }
        if (BN_is_one(g.get())) return p;
    }
}

/// Full-domain hash of `message` into [0, 2^(8k-1)), which is below any
/// modulus produced by draw_prime. SHA-256 counter-mode expansion.
Bytes fdh_bytes(ByteSpan message, size_t k) {
    Bytes out;
    out.reserve(k + 32);
    uint32_t counter = 0;
    while (out.size() < k) {
        ByteWriter w;
        w.var("tokenlab/blind-fdh/v1").u32(counter).raw(message);
        Digest block = hash(ByteSpan(w.bytes().data(), w.bytes().size()));
        out.insert(out.end(), block.bytes.begin(), block.bytes.end());
        ++counter;
    }
    out.resize(k);
    out[0] &= 0x7f;
    return out;
}

Bn fdh(ByteSpan message, size_t k) {
    return bn_from_bytes(fdh_bytes(message, k));
}

} // namespace

struct BlindSigner::Impl {
    Bn n;
    Bn d;
    Bn e;
};

BlindSigner::BlindSigner() : impl_(new Impl{make_bn(), make_bn(), make_bn()}) {}
BlindSigner::BlindSigner(BlindSigner&&) noexcept = default;
BlindSigner& BlindSigner::operator=(BlindSigner&&) noexcept = default;
BlindSigner::~BlindSigner() = default;

BlindSigner BlindSigner::generate(DetRng& rng, int modulus_bits) {
    if (modulus_bits < 256 || modulus_bits % 16 != 0) {
        throw std::invalid_argument("modulus_bits must be >= 256 and divisible by 16");
    }
    BnCtx ctx(BN_CTX_new());
    if (!ctx) throw std::runtime_error("BN_CTX_new failed");

    BlindSigner signer;
    Impl& k = *signer.impl_;
    if (BN_set_word(k.e.get(), kPublicExponent) != 1) {
        throw std::runtime_error("BN_set_word failed");
    }

    Bn p = draw_prime(rng, modulus_bits / 2, k.e.get(), ctx.get());
    Bn q = draw_prime(rng, modulus_bits / 2, k.e.get(), ctx.get());
    while (BN_cmp(p.get(), q.get()) == 0) {
        q = draw_prime(rng, modulus_bits / 2, k.e.get(), ctx.get());
    }

    if (BN_mul(k.n.get(), p.get(), q.get(), ctx.get()) != 1) {
        throw std::runtime_error("BN_mul failed");
    }

    // d = e^-1 mod (p-1)(q-1)
    Bn p1 = make_bn();
    Bn q1 = make_bn();
    Bn phi = make_bn();
    if (BN_sub(p1.get(), p.get(), BN_value_one()) != 1 ||
        BN_sub(q1.get(), q.get(), BN_value_one()) != 1 ||
        BN_mul(phi.get(), p1.get(), q1.get(), ctx.get()) != 1) {
        throw std::runtime_error("phi computation failed");
    }
    if (!BN_mod_inverse(k.d.get(), k.e.get(), phi.get(), ctx.get())) {
        throw std::runtime_error("exponent inversion failed");
    }

    signer.public_key_ = bn_to_fixed(k.n.get(), static_cast<size_t>(modulus_bits) / 8);
    return signer;
}

Result<Bytes> BlindSigner::blind_sign(ByteSpan blinded_message) const {
    const size_t k = public_key_.size();
    if (blinded_message.size() != k) return Result<Bytes>::rejected(Rejection::INVALID);

    Bn m = bn_from_bytes(blinded_message);
    if (BN_is_zero(m.get()) || BN_cmp(m.get(), impl_->n.get()) >= 0) {
        return Result<Bytes>::rejected(Rejection::INVALID);
    }

    BnCtx ctx(BN_CTX_new());
    Bn s = make_bn();
    if (!ctx || BN_mod_exp(s.get(), m.get(), impl_->d.get(), impl_->n.get(), ctx.get()) != 1) {
        return Result<Bytes>::rejected(Rejection::INVALID);
    }
    return Result<Bytes>::ok(bn_to_fixed(s.get(), k));
}

BlindingResult blind(ByteSpan message, ByteSpan issuer_public, DetRng& rng) {
    const size_t k = issuer_public.size();
    BnCtx ctx(BN_CTX_new());
    if (!ctx) throw std::runtime_error("BN_CTX_new failed");

    Bn n = bn_from_bytes(issuer_public);
    Bn e = make_bn();
    if (BN_set_word(e.get(), kPublicExponent) != 1) {
        throw std::runtime_error("BN_set_word failed");
    }

    // blinding factor r invertible mod n
    Bn r = make_bn();
    Bn g = make_bn();
    for (;;) {
        Bytes rb = rng.bytes(k);
        rb[0] &= 0x7f;
        r = bn_from_bytes(rb);
        if (BN_is_zero(r.get()) || BN_is_one(r.get())) continue;
        if (BN_gcd(g.get(), r.get(), n.get(), ctx.get()) != 1) {
            throw std::runtime_error("BN_gcd failed");
        }
        if (BN_is_one(g.get())) break;
    }

    Bn m = fdh(message, k);
    Bn re = make_bn();
    Bn blinded = make_bn();
    if (BN_mod_exp(re.get(), r.get(), e.get(), n.get(), ctx.get()) != 1 ||
        BN_mod_mul(blinded.get(), m.get(), re.get(), n.get(), ctx.get()) != 1) {
        throw std::runtime_error("blinding failed");
    }

    BlindingResult out;
    out.blinded_message = bn_to_fixed(blinded.get(), k);
    out.unblinding = bn_to_fixed(r.get(), k);
    return out;
}

Bytes unblind(ByteSpan blind_signature, ByteSpan unblinding, ByteSpan issuer_public) {
    const size_t k = issuer_public.size();
    BnCtx ctx(BN_CTX_new());
    if (!ctx) throw std::runtime_error("BN_CTX_new failed");

    Bn n = bn_from_bytes(issuer_public);
    Bn s_blind = bn_from_bytes(blind_signature);
    Bn r = bn_from_bytes(unblinding);

    Bn r_inv(BN_mod_inverse(nullptr, r.get(), n.get(), ctx.get()));
    if (!r_inv) {
        // non-invertible state: return an all-zero signature, which fails
        // verification downstream
        return Bytes(k, 0);
    }
    Bn s = make_bn();
    if (BN_mod_mul(s.get(), s_blind.get(), r_inv.get(), n.get(), ctx.get()) != 1) {
        throw std::runtime_error("unblinding failed");
    }
    return bn_to_fixed(s.get(), k);
}

bool blind_verify(ByteSpan issuer_public, ByteSpan message, ByteSpan signature) {
    const size_t k = issuer_public.size();
    if (k == 0 || signature.size() != k) return false;

    BnCtx ctx(BN_CTX_new());
    if (!ctx) return false;

    Bn n = bn_from_bytes(issuer_public);
    Bn s = bn_from_bytes(signature);
    if (BN_cmp(s.get(), n.get()) >= 0) return false;

    Bn e = make_bn();
    if (BN_set_word(e.get(), kPublicExponent) != 1) return false;

    Bn recovered = make_bn();
    if (BN_mod_exp(recovered.get(), s.get(), e.get(), n.get(), ctx.get()) != 1) {
        return false;
    }
    Bn expected = fdh(message, k);
    return BN_cmp(recovered.get(), expected.get()) == 0;
}

} // namespace tokenlab::crypto
