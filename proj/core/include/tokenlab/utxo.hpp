#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "tokenlab/blind.hpp"
#include "tokenlab/bytes.hpp"
#include "tokenlab/crypto.hpp"
#include "tokenlab/dlt.hpp"
#include "tokenlab/result.hpp"
#include "tokenlab/rng.hpp"

namespace tokenlab::utxo {

using dlt::LedgerEntry;
using dlt::UtxoOutPoint;
using dlt::UtxoOutput;
using dlt::UtxoPayload;
using dlt::UtxoSubtype;

// Everything needed to compare two ledgers for state equality after replay.
struct UtxoSnapshot {
    std::map<UtxoOutPoint, UtxoOutput> live;
    std::set<UtxoOutPoint> spent;
    std::set<Digest> spent_serials;

    bool operator==(const UtxoSnapshot&) const = default;
};

// Endogenous tracking: every transfer retires its inputs and mints fresh
// outputs, and the validator refuses any input it has already seen spent.
class UtxoLedger {
public:
    UtxoLedger(dlt::Network& network, crypto::KeyPair authority);
    UtxoLedger(dlt::Network& network, DetRng& rng);

    const crypto::KeyPair& authority() const { return authority_; }

    Result<Digest> mint(ByteSpan owner, const std::vector<uint64_t>& values);

    // Accepts an externally built mint; a signature that does not come from
    // the issuing authority is an unauthorised issue, not a crash.
    Result<Digest> submit_mint(const UtxoPayload& tx);

    // Builds a fully signed transfer without submitting it, so conflicting
    // transactions can be prepared up front and submitted in any order.
    static UtxoPayload make_spend(const std::vector<UtxoOutPoint>& inputs,
                                  const std::vector<UtxoOutput>& outputs,
                                  const std::vector<crypto::KeyPair>& signers);

    Result<Digest> submit_spend(const UtxoPayload& tx);

    // Greedy coin selection over the sender's live outputs, change back to
    // the sender.
    Result<Digest> transfer(const crypto::KeyPair& sender, ByteSpan recipient, uint64_t amount);

    // Full ancestry of the transaction that created the given output, oldest
    // first, ending with the creating transaction itself.
    Result<std::vector<Digest>> trace(const UtxoOutPoint& outpoint) const;

    uint64_t balance_of(ByteSpan owner) const;
    const std::map<UtxoOutPoint, UtxoOutput>& live() const { return live_; }
    const std::set<UtxoOutPoint>& spent() const { return spent_; }
    const UtxoPayload* transaction(const Digest& tx_id) const;

    UtxoSnapshot snapshot() const;

    // Rebuilds token state from certified ledger entries alone.
    static UtxoSnapshot replay(const std::vector<LedgerEntry>& entries);

    static Bytes witness_message(const Digest& tx_id, uint32_t input_index);
    static Bytes authority_message(const Digest& tx_id);

private:
    void apply(const UtxoPayload& tx);

    dlt::Network& network_;
    crypto::KeyPair authority_;
    std::map<UtxoOutPoint, UtxoOutput> live_;
    std::set<UtxoOutPoint> spent_;
    std::map<Digest, UtxoPayload> transactions_;
};

// A bearer note: fixed denomination, a serial the issuer never saw in the
// clear, and the issuer's plain RSA signature recovered by unblinding.
struct Note {
    uint64_t denomination = 0;
    Digest serial;
    Bytes signature;
};

// Client-side state between requesting a note and receiving the blind
// signature for it.
struct PendingNote {
    uint64_t denomination = 0;
    Digest serial;
    crypto::BlindingResult blinding;
};

struct IssueTranscript {
    uint64_t entry_index = 0;
    uint64_t denomination = 0;
    Bytes blinded_message;
};

struct SpendRecord {
    uint64_t entry_index = 0;
    uint64_t denomination = 0;
    Digest serial;
};

Bytes note_message(uint64_t denomination, const Digest& serial);

// Oblivious issuance over the same ledger: the issuer signs blinded notes and
// later accepts any note whose serial has not been redeemed before. It can
// tell a double spend when it happens, but not who withdrew the note.
class PrivateIssuer {
public:
    PrivateIssuer(dlt::Network& network, DetRng& rng,
                  std::vector<uint64_t> denominations = {1, 5, 10, 50},
                  int modulus_bits = 1024);

    const std::vector<uint64_t>& denominations() const { return denominations_; }
    Result<Bytes> issuer_public(uint64_t denomination) const;

    // Issuer side: sign a blinded request and record the issuance.
    Result<Bytes> issue(uint64_t denomination, const Bytes& blinded_message);

    // Issuer side: redeem a note, refusing unknown denominations, bad
    // signatures and serials seen before.
    Result<uint64_t> redeem(const Note& note);

    bool verify_note(const Note& note) const;
    Result<std::vector<Digest>> trace_note(const Note& note) const;

    const std::vector<IssueTranscript>& issue_transcripts() const { return issues_; }
    const std::vector<SpendRecord>& spend_records() const { return spends_; }
    const std::set<Digest>& spent_serials() const { return spent_serials_; }

private:
    const crypto::BlindSigner* signer_for(uint64_t denomination) const;

    dlt::Network& network_;
    std::vector<uint64_t> denominations_;
    std::vector<crypto::BlindSigner> signers_;
    std::set<Digest> spent_serials_;
    std::vector<IssueTranscript> issues_;
    std::vector<SpendRecord> spends_;
};

// Client side of a withdrawal: pick a fresh serial, blind the note message.
Result<PendingNote> request_note(uint64_t denomination, const Bytes& issuer_public, DetRng& rng);

// Client side: unblind the issuer's signature into a spendable note.
Result<Note> finish_note(const PendingNote& pending, const Bytes& blind_signature,
                         const Bytes& issuer_public);

} // namespace tokenlab::utxo
