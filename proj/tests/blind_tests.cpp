#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tokenlab/blind.hpp"
#include "tokenlab/bytes.hpp"
#include "tokenlab/rng.hpp"

using namespace tokenlab;

namespace {

ByteSpan span_of(const Bytes& b) {
    return ByteSpan(b.data(), b.size());
}

} // namespace

TEST_CASE("blind signature round trip verifies") {
    DetRng rng(101);
    auto signer = crypto::BlindSigner::generate(rng, 512);
    Bytes message = to_bytes("denomination=10,serial=deadbeef");

    auto blinded = crypto::blind(span_of(message), span_of(signer.public_key()), rng);
    auto blind_sig = signer.blind_sign(span_of(blinded.blinded_message));
    REQUIRE(blind_sig.accepted());
    Bytes sig = crypto::unblind(span_of(blind_sig.value()), span_of(blinded.unblinding),
                                span_of(signer.public_key()));
    CHECK(crypto::blind_verify(span_of(signer.public_key()), span_of(message), span_of(sig)));
}

TEST_CASE("verification fails for other messages and mangled signatures") {
    DetRng rng(102);
    auto signer = crypto::BlindSigner::generate(rng, 512);
    Bytes message = to_bytes("the signed message");

    auto blinded = crypto::blind(span_of(message), span_of(signer.public_key()), rng);
    auto blind_sig = signer.blind_sign(span_of(blinded.blinded_message));
    REQUIRE(blind_sig.accepted());
    Bytes sig = crypto::unblind(span_of(blind_sig.value()), span_of(blinded.unblinding),
                                span_of(signer.public_key()));

    Bytes other = to_bytes("the signed messagE");
    CHECK_FALSE(crypto::blind_verify(span_of(signer.public_key()), span_of(other), span_of(sig)));

    for (size_t i = 0; i < sig.size(); i += 7) {
        Bytes bad = sig;
        bad[i] ^= 0x01;
        CHECK_FALSE(
            crypto::blind_verify(span_of(signer.public_key()), span_of(message), span_of(bad)));
    }

    // A signature from one key does not verify under another.
    DetRng rng2(103);
    auto other_signer = crypto::BlindSigner::generate(rng2, 512);
    CHECK_FALSE(
        crypto::blind_verify(span_of(other_signer.public_key()), span_of(message), span_of(sig)));
}

TEST_CASE("random byte strings do not verify") {
    DetRng rng(104);
    auto signer = crypto::BlindSigner::generate(rng, 512);
    Bytes message = to_bytes("forgery target");
    for (int i = 0; i < 50; ++i) {
        Bytes fake = rng.bytes(signer.signature_size());
        CHECK_FALSE(
            crypto::blind_verify(span_of(signer.public_key()), span_of(message), span_of(fake)));
    }
}

TEST_CASE("issuer view shares no byte window with the unblinded pair") {
    DetRng rng(105);
    auto signer = crypto::BlindSigner::generate(rng, 512);
    // The unlinkability the private modes build on: nothing the issuer saw
    // (blinded message, blind signature) recurs in what gets spent (message,
    // unblinded signature), down to 8-byte windows.
    for (int i = 0; i < 20; ++i) {
        Bytes message = rng.bytes(48);
        auto blinded = crypto::blind(span_of(message), span_of(signer.public_key()), rng);
        auto blind_sig = signer.blind_sign(span_of(blinded.blinded_message));
        REQUIRE(blind_sig.accepted());
        Bytes sig = crypto::unblind(span_of(blind_sig.value()), span_of(blinded.unblinding),
                                    span_of(signer.public_key()));
        REQUIRE(crypto::blind_verify(span_of(signer.public_key()), span_of(message),
                                     span_of(sig)));

        for (const Bytes* seen : {&blinded.blinded_message, &blind_sig.value()}) {
            CHECK_FALSE(shares_substring(span_of(*seen), span_of(message), 8));
            CHECK_FALSE(shares_substring(span_of(*seen), span_of(sig), 8));
        }
    }
}

TEST_CASE("blinding the same message twice yields unrelated blinded values") {
    DetRng rng(106);
    auto signer = crypto::BlindSigner::generate(rng, 512);
    Bytes message = to_bytes("same note requested twice");
    auto one = crypto::blind(span_of(message), span_of(signer.public_key()), rng);
    auto two = crypto::blind(span_of(message), span_of(signer.public_key()), rng);
    CHECK(one.blinded_message != two.blinded_message);
    CHECK_FALSE(shares_substring(span_of(one.blinded_message), span_of(two.blinded_message), 8));
}

TEST_CASE("key generation is deterministic in the rng seed") {
    DetRng a(107), b(107), c(108);
    auto ka = crypto::BlindSigner::generate(a, 512);
    auto kb = crypto::BlindSigner::generate(b, 512);
    auto kc = crypto::BlindSigner::generate(c, 512);
    CHECK(ka.public_key() == kb.public_key());
    CHECK(ka.public_key() != kc.public_key());
    CHECK(ka.public_key().size() == 512 / 8);
}

TEST_CASE("malformed blinded messages are rejected, not fatal") {
    DetRng rng(109);
    auto signer = crypto::BlindSigner::generate(rng, 512);
    CHECK_FALSE(signer.blind_sign(ByteSpan()).accepted());
    Bytes short_input = rng.bytes(signer.signature_size() - 1);
    CHECK_FALSE(signer.blind_sign(span_of(short_input)).accepted());
    // The modulus itself encodes a value >= n, which must be refused.
    CHECK_FALSE(signer.blind_sign(span_of(signer.public_key())).accepted());
}

TEST_CASE("signatures from one denomination key fail under another") {
    DetRng rng(110);
    auto five = crypto::BlindSigner::generate(rng, 512);
    auto ten = crypto::BlindSigner::generate(rng, 512);
    Bytes message = to_bytes("note");

    auto blinded = crypto::blind(span_of(message), span_of(five.public_key()), rng);
    auto blind_sig = five.blind_sign(span_of(blinded.blinded_message));
    REQUIRE(blind_sig.accepted());
    Bytes sig = crypto::unblind(span_of(blind_sig.value()), span_of(blinded.unblinding),
                                span_of(five.public_key()));
    CHECK(crypto::blind_verify(span_of(five.public_key()), span_of(message), span_of(sig)));
    CHECK_FALSE(crypto::blind_verify(span_of(ten.public_key()), span_of(message), span_of(sig)));
}
