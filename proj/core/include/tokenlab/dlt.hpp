#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tokenlab/bytes.hpp"
#include "tokenlab/crypto.hpp"
#include "tokenlab/result.hpp"
#include "tokenlab/rng.hpp"

namespace tokenlab::dlt {

enum class EntryKind : uint8_t {
    EXTERNAL_EVIDENCE = 0,
    INTERLEDGER_TRANSFER = 1,
    BALANCE_TRANSFER = 2,
    UTXO_TRANSACTION = 3,
    EPOCH_COMMITMENT = 4,
};

std::string_view to_string(EntryKind kind);
std::optional<EntryKind> entry_kind_from_string(std::string_view s);

/// §-mode-1 record: two fiduciary identifiers plus a transaction digest.
/// Deliberately exposes nothing else.
struct ExternalEvidence {
    std::string fiduciary_a;
    std::string fiduciary_b;
    Digest tx_digest;
};

/// §-mode-2 record: counterparty account identifiers and the amount. The
/// ledger records, it does not keep balances for these.
struct InterledgerTransfer {
    std::string from_account;
    std::string to_account;
    uint64_t amount = 0;
};

/// §-mode-3 record: an internally managed balance movement. An empty
/// from_account marks issuance; only issuance changes total supply.
struct BalanceTransfer {
    std::string from_account;
    std::string to_account;
    uint64_t amount = 0;

    bool is_issuance() const { return from_account.empty(); }
};

struct UtxoOutPoint {
    Digest tx_id;
    uint32_t output_index = 0;

    auto operator<=>(const UtxoOutPoint&) const = default;
};

struct UtxoOutput {
    uint64_t value = 0;
    Bytes owner; // ed25519 verification key, transparent mode

    bool operator==(const UtxoOutput&) const = default;
};

enum class UtxoSubtype : uint8_t {
    MINT = 0,
    SPEND = 1,
    PRIVATE_ISSUE = 2,
    PRIVATE_SPEND = 3,
};

std::string_view to_string(UtxoSubtype s);
std::optional<UtxoSubtype> utxo_subtype_from_string(std::string_view s);

/// One UTXO_TRANSACTION payload. Transparent transactions carry explicit
/// inputs/outputs and witnesses; the private subtypes expose only what the
/// blind-issuance protocol reveals: a denomination count at issue time and
/// the (denomination, serial) pair of the token being retired at spend time.
struct UtxoPayload {
    UtxoSubtype subtype = UtxoSubtype::MINT;

    // MINT and SPEND
    std::vector<UtxoOutPoint> inputs; // empty for MINT
    std::vector<UtxoOutput> outputs;
    Bytes authority_signature;    // MINT: issuing authority over tx_id
    std::vector<Bytes> witnesses; // SPEND: one per input, owner over tx_id

    // PRIVATE_ISSUE and PRIVATE_SPEND
    uint64_t denomination = 0;
    uint64_t count = 0; // PRIVATE_ISSUE
    Digest serial{};    // PRIVATE_SPEND: serial of the retired token

    /// Canonical transaction id over (subtype, inputs, outputs); witnesses
    /// and signatures are excluded so the id is what gets signed.
    Digest tx_id() const;
};

/// An operator's signed Merkle root for one epoch. The ledger enforces at
/// most one certified commitment per (operator_id, epoch).
struct EpochCommitmentPayload {
    std::string operator_id;
    uint64_t epoch = 0;
    Digest root{};
    uint64_t leaf_count = 0;
    Bytes operator_signature;
};

using Payload = std::variant<ExternalEvidence, InterledgerTransfer, BalanceTransfer,
                             UtxoPayload, EpochCommitmentPayload>;

EntryKind kind_of(const Payload& payload);
Bytes canonical_payload(const Payload& payload);
Digest entry_digest(uint64_t index, const Payload& payload);

/// Message an operator signs over an epoch root.
Bytes epoch_signing_message(const std::string& operator_id, uint64_t epoch,
                            const Digest& root, uint64_t leaf_count);

struct QuorumSignature {
    uint32_t peer_id = 0;
    Bytes signature;
};

struct LedgerEntry {
    uint64_t index = 0;
    EntryKind kind = EntryKind::EXTERNAL_EVIDENCE;
    Payload payload;
    std::vector<QuorumSignature> quorum_cert;

    Digest digest() const { return entry_digest(index, payload); }
};

enum class PeerFault {
    HONEST,
    SILENT,       // never signs
    EQUIVOCATING, // signs whatever it is asked, including conflicts
};

struct Peer {
    uint32_t id = 0;
    crypto::KeyPair keys;
    PeerFault fault = PeerFault::HONEST;
    std::vector<Digest> local_log; // digests of entries this peer certified
};

/// Internally managed balances (mode 3). Accounts must be opened before use;
/// balances never go negative.
struct AccountState {
    std::map<std::string, uint64_t> balances;

    void open(const std::string& account) { balances.emplace(account, 0); }
    bool known(const std::string& account) const { return balances.count(account) != 0; }
    uint64_t balance(const std::string& account) const {
        auto it = balances.find(account);
        return it == balances.end() ? 0 : it->second;
    }
    uint64_t total() const;

    bool operator==(const AccountState&) const = default;
};

struct AuditViolation {
    uint64_t index = 0;
    std::string problem;
    std::optional<uint32_t> peer;
};

struct AuditReport {
    std::optional<AuditViolation> first_violation;

    bool clean() const { return !first_violation.has_value(); }
    std::string to_string() const;
};

/// Peer verification keys as exported/imported, enough to re-audit a log
/// offline.
struct NetworkMeta {
    size_t peer_count = 0;
    size_t threshold = 0;
    std::vector<std::pair<uint32_t, Bytes>> peer_keys;
    std::vector<std::string> fiduciaries;
    std::vector<std::pair<std::string, Bytes>> operators;
};

AuditReport audit_entries(const NetworkMeta& meta, const std::vector<LedgerEntry>& entries);

struct ImportedLog {
    NetworkMeta meta;
    std::vector<LedgerEntry> entries;
};

/// Deterministic simulated ledger network: N peers, threshold ceil(2N/3),
/// leaderless collect-signatures rounds. One caller at a time advances it;
/// the value may move between threads but is not internally synchronised.
class Network {
public:
    Network(size_t peer_count, DetRng& rng);

    size_t peer_count() const { return peers_.size(); }
    size_t quorum_threshold() const { return threshold_; }
    const Peer& peer(uint32_t id) const { return peers_.at(id); }
    void set_fault(uint32_t id, PeerFault fault) { peers_.at(id).fault = fault; }

    /// Append one entry: validate shape, collect peer signatures over the
    /// entry digest, certify at quorum. No state changes on rejection.
    Result<LedgerEntry> submit(Payload payload);

    // -- account-mode operations ------------------------------------------

    void register_fiduciary(const std::string& id);
    bool fiduciary_registered(const std::string& id) const;

    Result<LedgerEntry> record_external_evidence(const std::string& fiduciary_a,
                                                 const std::string& fiduciary_b,
                                                 const Digest& tx_digest);
    Result<LedgerEntry> record_interledger_transfer(const std::string& from_account,
                                                    const std::string& to_account,
                                                    uint64_t amount);
    /// Mode 3 transfer: validates against `state`, certifies the entry, then
    /// applies it. `state` is untouched on rejection.
    Result<LedgerEntry> apply_balance_transfer(AccountState& state, const std::string& from,
                                               const std::string& to, uint64_t amount);
    /// Explicit issuance entry; the only way total supply changes.
    Result<LedgerEntry> issue_balance(AccountState& state, const std::string& to,
                                      uint64_t amount);

    // -- operator registry for epoch commitments ---------------------------

    void register_operator(const std::string& id, ByteSpan verification_key);
    std::optional<Bytes> operator_key(const std::string& id) const;
    const LedgerEntry* find_epoch_commitment(const std::string& operator_id,
                                             uint64_t epoch) const;

    // -- log access ---------------------------------------------------------

    const std::vector<LedgerEntry>& log() const { return log_; }
    const LedgerEntry* entry_at(uint64_t index) const;

    AuditReport audit() const;
    NetworkMeta meta() const;

    void export_log(std::ostream& out) const;
    static std::optional<ImportedLog> import_log(std::istream& in);

    /// Adversarial probe used by the quorum-safety tests: ask every peer to
    /// sign an alternative payload at an already-certified index. Honest
    /// peers refuse; the returned signatures are whatever the faulty ones
    /// produce. A second certificate exists iff the result reaches quorum.
    std::vector<QuorumSignature> collect_conflicting_signatures(uint64_t index,
                                                                const Payload& alt_payload);

private:
    Result<LedgerEntry> certify_and_append(Payload payload);
    std::optional<Rejection> validate_shape(const Payload& payload) const;

    std::vector<Peer> peers_;
    size_t threshold_ = 0;
    std::vector<LedgerEntry> log_;
    std::vector<std::string> fiduciaries_;
    std::vector<std::pair<std::string, Bytes>> operators_;
};

/// Rebuild mode-3 balances from a certified log. Entries were validated at
/// submission, so replay applies them unconditionally; accounts open on
/// first touch.
AccountState replay_balances(const std::vector<LedgerEntry>& entries);

} // namespace tokenlab::dlt
