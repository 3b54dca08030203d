#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "tokenlab/crypto.hpp"
#include "tokenlab/dlt.hpp"

using namespace tokenlab;
using namespace tokenlab::dlt;

namespace {

Network make_network(size_t peers, uint64_t seed = 1) {
    DetRng rng(seed);
    return Network(peers, rng);
}

Result<LedgerEntry> submit_evidence(Network& net, int n) {
    return net.record_external_evidence("bank-a", "bank-b",
                                        crypto::hash("tx " + std::to_string(n)));
}

void register_banks(Network& net) {
    net.register_fiduciary("bank-a");
    net.register_fiduciary("bank-b");
}

} // namespace

TEST_CASE("quorum threshold is ceil(2N/3)") {
    // Independently computed: ceil(2*4/3)=3, ceil(2*7/3)=5, etc.
    CHECK(make_network(1).quorum_threshold() == 1);
    CHECK(make_network(2).quorum_threshold() == 2);
    CHECK(make_network(3).quorum_threshold() == 2);
    CHECK(make_network(4).quorum_threshold() == 3);
    CHECK(make_network(5).quorum_threshold() == 4);
    CHECK(make_network(6).quorum_threshold() == 4);
    CHECK(make_network(7).quorum_threshold() == 5);
    CHECK(make_network(10).quorum_threshold() == 7);
}

TEST_CASE("certified entries carry a valid quorum certificate") {
    auto net = make_network(4);
    register_banks(net);
    auto r = submit_evidence(net, 0);
    REQUIRE(r.accepted());
    const LedgerEntry& entry = r.value();
    CHECK(entry.index == 0);
    CHECK(entry.quorum_cert.size() >= net.quorum_threshold());
    Digest digest = entry.digest();
    for (const auto& qs : entry.quorum_cert) {
        const Bytes& key = net.peer(qs.peer_id).keys.public_key;
        CHECK(crypto::verify(ByteSpan(key.data(), key.size()), digest.span(),
                             ByteSpan(qs.signature.data(), qs.signature.size())));
    }
}

TEST_CASE("silent peers below threshold do not block; above they do") {
    auto net = make_network(4);
    register_banks(net);
    net.set_fault(0, PeerFault::SILENT);
    CHECK(submit_evidence(net, 0).accepted());

    net.set_fault(1, PeerFault::SILENT);
    auto r = submit_evidence(net, 1);
    REQUIRE_FALSE(r.accepted());
    CHECK(r.rejection() == Rejection::NO_QUORUM);
    CHECK(net.log().size() == 1); // no state change on rejection

    net.set_fault(1, PeerFault::HONEST);
    CHECK(submit_evidence(net, 2).accepted());
    CHECK(net.log().size() == 2);
    CHECK(net.log()[1].index == 1);
}

TEST_CASE("equivocating peers never contribute to certification quorum") {
    // Their signatures are over the wrong digest, so a validating collector
    // discards them: two faulty peers out of four leave only two honest
    // signers, below the threshold of three.
    auto net = make_network(4);
    register_banks(net);
    net.set_fault(0, PeerFault::EQUIVOCATING);
    CHECK(submit_evidence(net, 0).accepted());

    net.set_fault(1, PeerFault::EQUIVOCATING);
    auto r = submit_evidence(net, 1);
    REQUIRE_FALSE(r.accepted());
    CHECK(r.rejection() == Rejection::NO_QUORUM);
}

TEST_CASE("conflicting certificates stay below quorum with bounded faults") {
    auto net = make_network(4);
    register_banks(net);
    net.set_fault(3, PeerFault::EQUIVOCATING);
    // One equivocator cannot stop certification (3 honest >= 3)...
    auto r = submit_evidence(net, 0);
    REQUIRE(r.accepted());

    // ...and when asked to certify a conflicting payload at the same index,
    // only the equivocator signs: no second certificate can form.
    Payload alt = ExternalEvidence{"bank-a", "bank-b", crypto::hash("conflict")};
    auto sigs = net.collect_conflicting_signatures(0, alt);
    CHECK(sigs.size() == 1);
    CHECK(sigs.size() < net.quorum_threshold());
    // The conflicting signatures are genuine: they verify over the alternative
    // entry digest, which is exactly what makes equivocation dangerous.
    Digest alt_digest = entry_digest(0, alt);
    for (const auto& qs : sigs) {
        const Bytes& key = net.peer(qs.peer_id).keys.public_key;
        CHECK(crypto::verify(ByteSpan(key.data(), key.size()), alt_digest.span(),
                             ByteSpan(qs.signature.data(), qs.signature.size())));
    }

    auto honest = make_network(4);
    register_banks(honest);
    REQUIRE(submit_evidence(honest, 0).accepted());
    CHECK(honest.collect_conflicting_signatures(0, alt).empty());
}

TEST_CASE("account operations validate and apply atomically") {
    auto net = make_network(4);
    AccountState state;
    state.open("alice");
    state.open("bob");

    CHECK(net.issue_balance(state, "alice", 100).accepted());
    CHECK(state.balance("alice") == 100);
    CHECK(state.total() == 100);

    CHECK(net.apply_balance_transfer(state, "alice", "bob", 30).accepted());
    CHECK(state.balance("alice") == 70);
    CHECK(state.balance("bob") == 30);
    CHECK(state.total() == 100);

    auto insufficient = net.apply_balance_transfer(state, "bob", "alice", 31);
    REQUIRE_FALSE(insufficient.accepted());
    CHECK(insufficient.rejection() == Rejection::INSUFFICIENT_FUNDS);
    CHECK(state.balance("bob") == 30); // untouched on rejection

    auto unknown = net.apply_balance_transfer(state, "carol", "bob", 1);
    REQUIRE_FALSE(unknown.accepted());
    CHECK(unknown.rejection() == Rejection::UNKNOWN_PARTY);

    auto zero = net.apply_balance_transfer(state, "alice", "bob", 0);
    REQUIRE_FALSE(zero.accepted());
    CHECK(zero.rejection() == Rejection::INVALID);
}

TEST_CASE("external evidence requires registered fiduciaries") {
    auto net = make_network(4);
    auto r = net.record_external_evidence("bank-a", "bank-b", crypto::hash("t"));
    REQUIRE_FALSE(r.accepted());
    CHECK(r.rejection() == Rejection::UNKNOWN_PARTY);

    register_banks(net);
    CHECK(net.record_external_evidence("bank-a", "bank-b", crypto::hash("t")).accepted());
    CHECK(net.record_interledger_transfer("acct-1", "acct-2", 40).accepted());
    CHECK(net.record_interledger_transfer("acct-1", "acct-2", 0).rejection() ==
          Rejection::INVALID);
}

TEST_CASE("replayed balances equal live state after a mixed history") {
    auto net = make_network(4);
    AccountState state;
    DetRng rng(77);
    std::vector<std::string> names = {"a", "b", "c", "d"};
    for (const auto& n : names) state.open(n);
    for (const auto& n : names) {
        REQUIRE(net.issue_balance(state, n, 50 + rng.below(100)).accepted());
    }
    for (int i = 0; i < 200; ++i) {
        const auto& from = names[rng.below(names.size())];
        const auto& to = names[rng.below(names.size())];
        uint64_t amount = rng.below(40);
        net.apply_balance_transfer(state, from, to, amount); // rejections fine
    }
    CHECK(replay_balances(net.log()) == state);
}

TEST_CASE("epoch commitments enforce per-(operator, epoch) uniqueness") {
    auto net = make_network(4);
    DetRng rng(5);
    auto keys = crypto::generate_keypair(rng);
    net.register_operator("op-1", ByteSpan(keys.public_key.data(), keys.public_key.size()));

    auto commit = [&](uint64_t epoch, const Digest& root) {
        EpochCommitmentPayload p;
        p.operator_id = "op-1";
        p.epoch = epoch;
        p.root = root;
        p.leaf_count = 3;
        Bytes msg = epoch_signing_message("op-1", epoch, root, 3);
        p.operator_signature =
            crypto::sign(ByteSpan(keys.secret_key.data(), keys.secret_key.size()),
                         ByteSpan(msg.data(), msg.size()));
        return net.submit(p);
    };

    CHECK(commit(0, crypto::hash("root-0")).accepted());
    auto dup = commit(0, crypto::hash("root-0-alt"));
    REQUIRE_FALSE(dup.accepted());
    CHECK(dup.rejection() == Rejection::DUPLICATE_EPOCH);
    CHECK(commit(1, crypto::hash("root-1")).accepted());

    EpochCommitmentPayload unknown;
    unknown.operator_id = "op-2";
    unknown.epoch = 0;
    unknown.root = crypto::hash("r");
    CHECK(net.submit(unknown).rejection() == Rejection::UNKNOWN_PARTY);

    EpochCommitmentPayload unsigned_payload;
    unsigned_payload.operator_id = "op-1";
    unsigned_payload.epoch = 2;
    unsigned_payload.root = crypto::hash("r2");
    unsigned_payload.leaf_count = 1;
    CHECK(net.submit(unsigned_payload).rejection() == Rejection::BAD_SIGNATURE);
}

TEST_CASE("audit passes an honest log and flags tampering") {
    auto net = make_network(4);
    register_banks(net);
    for (int i = 0; i < 5; ++i) REQUIRE(submit_evidence(net, i).accepted());
    CHECK(net.audit().clean());

    NetworkMeta meta = net.meta();

    SUBCASE("payload tampering invalidates the certificate") {
        auto entries = net.log();
        std::get<ExternalEvidence>(entries[2].payload).tx_digest = crypto::hash("swapped");
        auto report = audit_entries(meta, entries);
        REQUIRE_FALSE(report.clean());
        CHECK(report.first_violation->index == 2);
    }

    SUBCASE("dropping signatures below threshold is flagged") {
        auto entries = net.log();
        entries[3].quorum_cert.resize(meta.threshold - 1);
        auto report = audit_entries(meta, entries);
        REQUIRE_FALSE(report.clean());
        CHECK(report.first_violation->index == 3);
    }

    SUBCASE("a duplicated signer cannot pad out a quorum") {
        auto entries = net.log();
        entries[1].quorum_cert[1] = entries[1].quorum_cert[0];
        auto report = audit_entries(meta, entries);
        REQUIRE_FALSE(report.clean());
        CHECK(report.first_violation->index == 1);
        CHECK(report.first_violation->peer == entries[1].quorum_cert[0].peer_id);
    }

    SUBCASE("unknown peers are flagged") {
        auto entries = net.log();
        entries[0].quorum_cert[0].peer_id = 99;
        auto report = audit_entries(meta, entries);
        REQUIRE_FALSE(report.clean());
        CHECK(report.first_violation->index == 0);
    }

    SUBCASE("index gaps are flagged") {
        auto entries = net.log();
        entries.erase(entries.begin() + 1);
        auto report = audit_entries(meta, entries);
        CHECK_FALSE(report.clean());
    }
}

TEST_CASE("export and import round trip the whole log") {
    auto net = make_network(5, 9);
    register_banks(net);
    AccountState state;
    state.open("alice");
    state.open("bob");
    REQUIRE(net.issue_balance(state, "alice", 100).accepted());
    REQUIRE(net.apply_balance_transfer(state, "alice", "bob", 25).accepted());
    REQUIRE(submit_evidence(net, 1).accepted());
    REQUIRE(net.record_interledger_transfer("x", "y", 7).accepted());

    DetRng rng(5);
    auto keys = crypto::generate_keypair(rng);
    net.register_operator("op-1", ByteSpan(keys.public_key.data(), keys.public_key.size()));
    EpochCommitmentPayload p;
    p.operator_id = "op-1";
    p.epoch = 0;
    p.root = crypto::hash("root");
    p.leaf_count = 2;
    Bytes msg = epoch_signing_message("op-1", 0, p.root, 2);
    p.operator_signature = crypto::sign(ByteSpan(keys.secret_key.data(), keys.secret_key.size()),
                                        ByteSpan(msg.data(), msg.size()));
    REQUIRE(net.submit(p).accepted());

    std::stringstream stream;
    net.export_log(stream);
    auto imported = Network::import_log(stream);
    REQUIRE(imported.has_value());
    CHECK(imported->meta.peer_count == 5);
    CHECK(imported->meta.threshold == net.quorum_threshold());
    REQUIRE(imported->entries.size() == net.log().size());
    for (size_t i = 0; i < imported->entries.size(); ++i) {
        CHECK(imported->entries[i].digest() == net.log()[i].digest());
        CHECK(imported->entries[i].quorum_cert.size() == net.log()[i].quorum_cert.size());
    }
    CHECK(audit_entries(imported->meta, imported->entries).clean());
    CHECK(replay_balances(imported->entries) == state);

    // A second export of the same log is byte-identical.
    std::stringstream again;
    net.export_log(again);
    std::stringstream first;
    net.export_log(first);
    CHECK(again.str() == first.str());
}

TEST_CASE("import rejects malformed input") {
    std::stringstream empty;
    CHECK_FALSE(Network::import_log(empty).has_value());
    std::stringstream garbage("not json\n");
    CHECK_FALSE(Network::import_log(garbage).has_value());

    auto net = make_network(4);
    register_banks(net);
    REQUIRE(submit_evidence(net, 0).accepted());
    std::stringstream stream;
    net.export_log(stream);
    std::string text = stream.str();
    std::stringstream truncated(text.substr(0, text.size() / 2));
    CHECK_FALSE(Network::import_log(truncated).has_value());
}

TEST_CASE("utxo payload shape validation happens at the ledger boundary") {
    auto net = make_network(4);

    UtxoPayload no_outputs;
    no_outputs.subtype = UtxoSubtype::MINT;
    CHECK(net.submit(no_outputs).rejection() == Rejection::INVALID);

    UtxoPayload spend_without_inputs;
    spend_without_inputs.subtype = UtxoSubtype::SPEND;
    spend_without_inputs.outputs.push_back({5, Bytes(32, 1)});
    CHECK(net.submit(spend_without_inputs).rejection() == Rejection::INVALID);

    UtxoPayload zero_value_output;
    zero_value_output.subtype = UtxoSubtype::MINT;
    zero_value_output.outputs.push_back({0, Bytes(32, 1)});
    zero_value_output.authority_signature = Bytes(64, 0);
    CHECK(net.submit(zero_value_output).rejection() == Rejection::INVALID);
}

TEST_CASE("entry digests are position-bound") {
    Payload p = ExternalEvidence{"a", "b", crypto::hash("t")};
    CHECK(entry_digest(0, p) != entry_digest(1, p));
    Payload q = ExternalEvidence{"a", "b", crypto::hash("u")};
    CHECK(entry_digest(0, p) != entry_digest(0, q));
}

TEST_CASE("kind and subtype names round trip") {
    for (auto kind : {EntryKind::EXTERNAL_EVIDENCE, EntryKind::INTERLEDGER_TRANSFER,
                      EntryKind::BALANCE_TRANSFER, EntryKind::UTXO_TRANSACTION,
                      EntryKind::EPOCH_COMMITMENT}) {
        CHECK(entry_kind_from_string(to_string(kind)) == kind);
    }
    for (auto sub : {UtxoSubtype::MINT, UtxoSubtype::SPEND, UtxoSubtype::PRIVATE_ISSUE,
                     UtxoSubtype::PRIVATE_SPEND}) {
        CHECK(utxo_subtype_from_string(to_string(sub)) == sub);
    }
    CHECK_FALSE(entry_kind_from_string("NOT_A_KIND").has_value());
}
