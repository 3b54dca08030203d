#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "tokenlab/utxo.hpp"

using namespace tokenlab;
using namespace tokenlab::utxo;

namespace {

ByteSpan span_of(const Bytes& b) {
    return ByteSpan(b.data(), b.size());
}

struct World {
    DetRng rng{1};
    dlt::Network net{4, rng};
    UtxoLedger ledger{net, rng};
    crypto::KeyPair alice = crypto::generate_keypair(rng);
    crypto::KeyPair bob = crypto::generate_keypair(rng);
    crypto::KeyPair carol = crypto::generate_keypair(rng);
};

dlt::UtxoOutPoint only_outpoint_of(const UtxoLedger& ledger, const Bytes& owner) {
    for (const auto& [outpoint, output] : ledger.live()) {
        if (output.owner == owner) return outpoint;
    }
    REQUIRE(false);
    return {};
}

} // namespace

TEST_CASE("mint creates live outputs owned by the recipient") {
    World w;
    auto r = w.ledger.mint(span_of(w.alice.public_key), {10, 5});
    REQUIRE(r.accepted());
    CHECK(w.ledger.live().size() == 2);
    CHECK(w.ledger.balance_of(span_of(w.alice.public_key)) == 15);
    CHECK(w.net.log().size() == 1);
    CHECK(w.net.log()[0].kind == dlt::EntryKind::UTXO_TRANSACTION);

    CHECK(w.ledger.mint(span_of(w.alice.public_key), {}).rejection() == Rejection::INVALID);
    CHECK(w.ledger.mint(span_of(w.alice.public_key), {0}).rejection() == Rejection::INVALID);
}

TEST_CASE("only the authority can mint") {
    World w;
    DetRng other_rng(99);
    auto impostor = crypto::generate_keypair(other_rng);

    UtxoPayload tx;
    tx.subtype = UtxoSubtype::MINT;
    tx.outputs.push_back({10, w.alice.public_key});
    Bytes msg = UtxoLedger::authority_message(tx.tx_id());
    tx.authority_signature = crypto::sign(span_of(impostor.secret_key), span_of(msg));
    auto r = w.ledger.submit_mint(tx);
    REQUIRE_FALSE(r.accepted());
    CHECK(r.rejection() == Rejection::UNAUTHORISED_ISSUE);
    CHECK(w.ledger.live().empty());
}

TEST_CASE("transfer retires inputs and mints outputs with change") {
    World w;
    REQUIRE(w.ledger.mint(span_of(w.alice.public_key), {10}).accepted());
    auto r = w.ledger.transfer(w.alice, span_of(w.bob.public_key), 7);
    REQUIRE(r.accepted());
    CHECK(w.ledger.balance_of(span_of(w.bob.public_key)) == 7);
    CHECK(w.ledger.balance_of(span_of(w.alice.public_key)) == 3);
    CHECK(w.ledger.spent().size() == 1);

    auto too_much = w.ledger.transfer(w.alice, span_of(w.bob.public_key), 4);
    REQUIRE_FALSE(too_much.accepted());
    CHECK(too_much.rejection() == Rejection::INSUFFICIENT_FUNDS);
}

TEST_CASE("value is conserved: outputs must sum to inputs") {
    World w;
    REQUIRE(w.ledger.mint(span_of(w.alice.public_key), {10}).accepted());
    auto input = only_outpoint_of(w.ledger, w.alice.public_key);

    auto inflate = UtxoLedger::make_spend({input}, {{11, w.bob.public_key}}, {w.alice});
    CHECK(w.ledger.submit_spend(inflate).rejection() == Rejection::VALUE_MISMATCH);

    auto deflate = UtxoLedger::make_spend({input}, {{9, w.bob.public_key}}, {w.alice});
    CHECK(w.ledger.submit_spend(deflate).rejection() == Rejection::VALUE_MISMATCH);

    auto exact = UtxoLedger::make_spend({input}, {{10, w.bob.public_key}}, {w.alice});
    CHECK(w.ledger.submit_spend(exact).accepted());
}

TEST_CASE("spends demand a witness from the current owner") {
    World w;
    REQUIRE(w.ledger.mint(span_of(w.alice.public_key), {10}).accepted());
    auto input = only_outpoint_of(w.ledger, w.alice.public_key);

    auto stolen = UtxoLedger::make_spend({input}, {{10, w.carol.public_key}}, {w.bob});
    CHECK(w.ledger.submit_spend(stolen).rejection() == Rejection::BAD_SIGNATURE);

    auto unknown = UtxoLedger::make_spend({{crypto::hash("nowhere"), 0}},
                                          {{10, w.carol.public_key}}, {w.alice});
    CHECK(w.ledger.submit_spend(unknown).rejection() == Rejection::UNKNOWN_TOKEN);

    auto empty_outputs = UtxoLedger::make_spend({input}, {}, {w.alice});
    CHECK(w.ledger.submit_spend(empty_outputs).rejection() == Rejection::INVALID);
}

TEST_CASE("conflicting spends: exactly one wins in either order") {
    for (int order = 0; order < 2; ++order) {
        World w;
        REQUIRE(w.ledger.mint(span_of(w.alice.public_key), {10}).accepted());
        auto input = only_outpoint_of(w.ledger, w.alice.public_key);
        auto to_bob = UtxoLedger::make_spend({input}, {{10, w.bob.public_key}}, {w.alice});
        auto to_carol = UtxoLedger::make_spend({input}, {{10, w.carol.public_key}}, {w.alice});

        auto first = w.ledger.submit_spend(order == 0 ? to_bob : to_carol);
        auto second = w.ledger.submit_spend(order == 0 ? to_carol : to_bob);
        CHECK(first.accepted());
        REQUIRE_FALSE(second.accepted());
        CHECK(second.rejection() == Rejection::DOUBLE_SPEND);
        CHECK(w.ledger.balance_of(span_of(order == 0 ? w.bob.public_key
                                                     : w.carol.public_key)) == 10);
        CHECK(w.ledger.live().size() == 1);
    }
}

TEST_CASE("a transaction naming the same input twice is a double spend") {
    World w;
    REQUIRE(w.ledger.mint(span_of(w.alice.public_key), {10}).accepted());
    auto input = only_outpoint_of(w.ledger, w.alice.public_key);
    auto doubled = UtxoLedger::make_spend({input, input}, {{20, w.bob.public_key}},
                                          {w.alice, w.alice});
    CHECK(w.ledger.submit_spend(doubled).rejection() == Rejection::DOUBLE_SPEND);
}

TEST_CASE("trace returns the full ancestry oldest-first") {
    World w;
    auto minted = w.ledger.mint(span_of(w.alice.public_key), {10});
    REQUIRE(minted.accepted());
    REQUIRE(w.ledger.transfer(w.alice, span_of(w.bob.public_key), 10).accepted());
    REQUIRE(w.ledger.transfer(w.bob, span_of(w.carol.public_key), 10).accepted());

    auto carol_out = only_outpoint_of(w.ledger, w.carol.public_key);
    auto ancestry = w.ledger.trace(carol_out);
    REQUIRE(ancestry.accepted());
    REQUIRE(ancestry.value().size() == 3);
    CHECK(ancestry.value().front() == minted.value());
    CHECK(ancestry.value().back() == carol_out.tx_id);

    auto missing = w.ledger.trace({crypto::hash("nowhere"), 0});
    CHECK(missing.rejection() == Rejection::UNKNOWN_TOKEN);
}

TEST_CASE("replay from certified entries reproduces live and spent sets") {
    World w;
    DetRng script(1234);
    std::vector<crypto::KeyPair> people = {w.alice, w.bob, w.carol};
    for (const auto& p : people) {
        REQUIRE(w.ledger.mint(span_of(p.public_key), {script.below(50) + 1, 5}).accepted());
    }
    for (int i = 0; i < 60; ++i) {
        const auto& from = people[script.below(3)];
        const auto& to = people[script.below(3)];
        w.ledger.transfer(from, span_of(to.public_key), script.below(30) + 1);
    }
    CHECK(UtxoLedger::replay(w.net.log()) == w.ledger.snapshot());
}

TEST_CASE("private notes issue, redeem once, and stay untraceable") {
    DetRng rng(5);
    dlt::Network net(4, rng);
    PrivateIssuer issuer(net, rng, {1, 5}, 512);

    auto key = issuer.issuer_public(5);
    REQUIRE(key.accepted());
    auto pending = request_note(5, key.value(), rng);
    REQUIRE(pending.accepted());
    auto blind_sig = issuer.issue(5, pending.value().blinding.blinded_message);
    REQUIRE(blind_sig.accepted());
    auto note = finish_note(pending.value(), blind_sig.value(), key.value());
    REQUIRE(note.accepted());
    CHECK(issuer.verify_note(note.value()));

    // Issue recorded on the ledger as a count, not a serial.
    REQUIRE(net.log().size() == 1);
    const auto& issue_payload = std::get<dlt::UtxoPayload>(net.log()[0].payload);
    CHECK(issue_payload.subtype == dlt::UtxoSubtype::PRIVATE_ISSUE);
    CHECK(issue_payload.denomination == 5);
    CHECK(issue_payload.count == 1);

    auto first = issuer.redeem(note.value());
    REQUIRE(first.accepted());
    auto second = issuer.redeem(note.value());
    REQUIRE_FALSE(second.accepted());
    CHECK(second.rejection() == Rejection::DOUBLE_SPEND);

    // Redemption reveals the serial; that is the designed disclosure point.
    const auto& spend_payload = std::get<dlt::UtxoPayload>(net.log()[1].payload);
    CHECK(spend_payload.subtype == dlt::UtxoSubtype::PRIVATE_SPEND);
    CHECK(spend_payload.serial == note.value().serial);

    CHECK(issuer.trace_note(note.value()).rejection() == Rejection::NOT_TRACEABLE);
}

TEST_CASE("the issuer transcript never contains a note serial") {
    DetRng rng(6);
    dlt::Network net(4, rng);
    PrivateIssuer issuer(net, rng, {1}, 512);
    auto key = issuer.issuer_public(1);
    REQUIRE(key.accepted());

    std::vector<Note> notes;
    for (int i = 0; i < 10; ++i) {
        auto pending = request_note(1, key.value(), rng);
        REQUIRE(pending.accepted());
        auto sig = issuer.issue(1, pending.value().blinding.blinded_message);
        REQUIRE(sig.accepted());
        auto note = finish_note(pending.value(), sig.value(), key.value());
        REQUIRE(note.accepted());
        notes.push_back(note.value());
    }

    Bytes transcript;
    for (const auto& t : issuer.issue_transcripts()) {
        transcript.insert(transcript.end(), t.blinded_message.begin(), t.blinded_message.end());
    }
    REQUIRE_FALSE(transcript.empty());
    for (const auto& note : notes) {
        CHECK_FALSE(contains_bytes(span_of(transcript), note.serial.span()));
        CHECK_FALSE(shares_substring(span_of(transcript), span_of(note.signature), 16));
    }
}

TEST_CASE("denomination discipline is enforced on both sides") {
    DetRng rng(7);
    dlt::Network net(4, rng);
    PrivateIssuer issuer(net, rng, {1, 5}, 512);

    CHECK(issuer.issuer_public(3).rejection() == Rejection::BAD_DENOMINATION);
    CHECK(issuer.issue(3, Bytes(64, 1)).rejection() == Rejection::BAD_DENOMINATION);

    auto key = issuer.issuer_public(1);
    REQUIRE(key.accepted());
    auto pending = request_note(1, key.value(), rng);
    REQUIRE(pending.accepted());
    auto sig = issuer.issue(1, pending.value().blinding.blinded_message);
    REQUIRE(sig.accepted());
    auto note = finish_note(pending.value(), sig.value(), key.value());
    REQUIRE(note.accepted());

    Note altered = note.value();
    altered.denomination = 5;
    auto r = issuer.redeem(altered);
    REQUIRE_FALSE(r.accepted());
    // Signed under the 1-unit key, so it fails the 5-unit key check.
    CHECK(r.rejection() == Rejection::BAD_SIGNATURE);

    Note forged = note.value();
    forged.signature = rng.bytes(forged.signature.size());
    CHECK(issuer.redeem(forged).rejection() == Rejection::BAD_SIGNATURE);
}

TEST_CASE("private spends replay into the spent serial set") {
    DetRng rng(8);
    dlt::Network net(4, rng);
    PrivateIssuer issuer(net, rng, {1}, 512);
    auto key = issuer.issuer_public(1);
    REQUIRE(key.accepted());

    std::set<Digest> redeemed;
    for (int i = 0; i < 5; ++i) {
        auto pending = request_note(1, key.value(), rng);
        auto sig = issuer.issue(1, pending.value().blinding.blinded_message);
        auto note = finish_note(pending.value(), sig.value(), key.value());
        REQUIRE(note.accepted());
        if (i % 2 == 0) {
            REQUIRE(issuer.redeem(note.value()).accepted());
            redeemed.insert(note.value().serial);
        }
    }
    auto snapshot = UtxoLedger::replay(net.log());
    CHECK(snapshot.spent_serials == redeemed);
    CHECK(snapshot.spent_serials == issuer.spent_serials());
}
