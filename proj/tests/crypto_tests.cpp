#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tokenlab/bytes.hpp"
#include "tokenlab/crypto.hpp"
#include "tokenlab/rng.hpp"

using namespace tokenlab;

TEST_CASE("sha256 matches the published test vectors") {
    // FIPS 180-2 vectors, checked against an external implementation.
    CHECK(crypto::hash("").hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(crypto::hash("abc").hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(crypto::hash("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq").hex() ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 is sensitive to any single bit flip") {
    Bytes message = to_bytes("the quick brown fox jumps over the lazy dog");
    Digest base = crypto::hash(message);
    for (size_t byte = 0; byte < message.size(); ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            Bytes flipped = message;
            flipped[byte] ^= static_cast<uint8_t>(1 << bit);
            CHECK(crypto::hash(flipped) != base);
        }
    }
}

TEST_CASE("ed25519 sign/verify round trip") {
    DetRng rng(1);
    auto kp = crypto::generate_keypair(rng);
    CHECK(kp.public_key.size() == crypto::kPublicKeyBytes);
    CHECK(kp.secret_key.size() == crypto::kSecretKeyBytes);

    Bytes message = to_bytes("statement of ownership");
    Bytes sig = crypto::sign(kp.secret_key, message);
    CHECK(sig.size() == crypto::kSignatureBytes);
    CHECK(crypto::verify(kp.public_key, message, sig));
}

TEST_CASE("ed25519 rejects wrong message, key, and mangled signatures") {
    DetRng rng(2);
    auto kp = crypto::generate_keypair(rng);
    auto other = crypto::generate_keypair(rng);
    Bytes message = to_bytes("pay to the order of");
    Bytes sig = crypto::sign(kp.secret_key, message);

    CHECK_FALSE(crypto::verify(kp.public_key, to_bytes("pay to the order oF"), sig));
    CHECK_FALSE(crypto::verify(other.public_key, message, sig));

    for (size_t i = 0; i < sig.size(); ++i) {
        Bytes bad = sig;
        bad[i] ^= 0x01;
        CHECK_FALSE(crypto::verify(kp.public_key, message, bad));
    }

    CHECK_FALSE(crypto::verify(kp.public_key, message, Bytes{}));
    CHECK_FALSE(crypto::verify(Bytes{}, message, sig));
}

TEST_CASE("ed25519 signing is deterministic per (key, message)") {
    DetRng rng(3);
    auto kp = crypto::generate_keypair(rng);
    Bytes message = to_bytes("same message");
    CHECK(crypto::sign(kp.secret_key, message) == crypto::sign(kp.secret_key, message));
}

TEST_CASE("keypairs derive deterministically from the rng seed") {
    DetRng a(42), b(42), c(43);
    auto ka = crypto::generate_keypair(a);
    auto kb = crypto::generate_keypair(b);
    auto kc = crypto::generate_keypair(c);
    CHECK(ka.public_key == kb.public_key);
    CHECK(ka.secret_key == kb.secret_key);
    CHECK(ka.public_key != kc.public_key);
}

TEST_CASE("detrng streams are reproducible and seed-sensitive") {
    DetRng a(7), b(7), c(8);
    CHECK(a.bytes(64) == b.bytes(64));
    CHECK(a.next_u64() == b.next_u64());
    CHECK(DetRng(7).bytes(64) != c.bytes(64));

    DetRng bounded(9);
    for (int i = 0; i < 1000; ++i) {
        CHECK(bounded.below(17) < 17);
    }
}

TEST_CASE("hex encoding round trips and rejects malformed input") {
    Bytes data = {0x00, 0x01, 0xab, 0xff};
    CHECK(to_hex(ByteSpan(data.data(), data.size())) == "0001abff");
    CHECK(from_hex("0001abff") == data);
    CHECK(from_hex("0001ABFF") == data);
    CHECK_FALSE(from_hex("abc").has_value());
    CHECK_FALSE(from_hex("zz").has_value());
    CHECK(from_hex("")->empty());

    Digest d = crypto::hash("x");
    CHECK(Digest::from_hex(d.hex()) == d);
    CHECK_FALSE(Digest::from_hex("abcd").has_value());
}

TEST_CASE("bytewriter emits big-endian fixed-width and length-prefixed fields") {
    ByteWriter w;
    w.u8(0x01).u32(0x00010203).u64(0x0405060708090a0bULL).var(std::string_view("hi"));
    Bytes expected = {0x01,
                      0x00, 0x01, 0x02, 0x03,
                      0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0a, 0x0b,
                      0x00, 0x00, 0x00, 0x02, 'h', 'i'};
    CHECK(w.bytes() == expected);
}

TEST_CASE("bytewriter framing is injective across field boundaries") {
    // ("ab", "c") and ("a", "bc") must not collide once length-prefixed.
    ByteWriter w1, w2;
    w1.var(std::string_view("ab")).var(std::string_view("c"));
    w2.var(std::string_view("a")).var(std::string_view("bc"));
    CHECK(w1.bytes() != w2.bytes());
}

TEST_CASE("substring detectors agree with a naive oracle") {
    Bytes a = to_bytes("the serial is 0123456789abcdef in here");
    Bytes b = to_bytes("elsewhere: 0123456789abcdef appears too");
    Bytes c = to_bytes("entirely unrelated content, nothing shared");

    CHECK(shares_substring(ByteSpan(a.data(), a.size()), ByteSpan(b.data(), b.size()), 16));
    CHECK_FALSE(shares_substring(ByteSpan(a.data(), a.size()), ByteSpan(c.data(), c.size()), 16));
    CHECK_FALSE(shares_substring(ByteSpan(a.data(), a.size()), ByteSpan(b.data(), b.size()), 32));

    Bytes needle = to_bytes("0123456789abcdef");
    CHECK(contains_bytes(ByteSpan(a.data(), a.size()), ByteSpan(needle.data(), needle.size())));
    CHECK_FALSE(
        contains_bytes(ByteSpan(c.data(), c.size()), ByteSpan(needle.data(), needle.size())));
    CHECK_FALSE(contains_bytes(ByteSpan(needle.data(), 4), ByteSpan(needle.data(), 8)));
}
