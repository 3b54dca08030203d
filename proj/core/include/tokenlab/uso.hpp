#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tokenlab/blind.hpp"
#include "tokenlab/bytes.hpp"
#include "tokenlab/crypto.hpp"
#include "tokenlab/dlt.hpp"
#include "tokenlab/merkle.hpp"
#include "tokenlab/result.hpp"
#include "tokenlab/rng.hpp"

namespace tokenlab::uso {

enum class IssuePrivacy : uint8_t { TRANSPARENT = 0, BLIND = 1 };
enum class Mitigation : uint8_t { DLT = 0, SELF_ATTESTED = 1 };

std::string_view to_string(IssuePrivacy p);
std::string_view to_string(Mitigation m);
std::optional<IssuePrivacy> issue_privacy_from_string(std::string_view s);
std::optional<Mitigation> mitigation_from_string(std::string_view s);

// Outcome of verifying an asset against its proof of provenance, in check
// order: the first failing stage names the result.
enum class VerifyStatus {
    VALID,
    BAD_GENESIS,     // issuer signature does not authenticate the genesis
    BROKEN_CHAIN,    // a record does not extend the digest of its predecessor
    BAD_ENCUMBRANCE, // an update is not signed by the owner it dispossesses
    PROOF_MISMATCH,  // a proof component contradicts the committed history
    HISTORY_GAP,     // coverage is incomplete: missing epochs or counters
};

std::string_view to_string(VerifyStatus s);

// The asset's birth certificate. The issuance context (operator, epoch,
// nonce) is part of the signed record: pinning the first epoch here is what
// stops a seller from re-anchoring an old asset in a later epoch and hiding
// intervening transfers.
struct GenesisRecord {
    std::string operator_id;
    uint64_t denomination = 0;
    Bytes owner_public;
    uint64_t issued_epoch = 0;
    Digest nonce;
    IssuePrivacy privacy = IssuePrivacy::TRANSPARENT;
    Bytes issuer_signature;

    // What the issuer signs (plainly or blindly).
    Bytes core_message() const;
    // Digest committed at issuance; doubles as the asset identifier.
    Digest record_digest() const;
    Digest asset_id() const { return record_digest(); }

    bool operator==(const GenesisRecord&) const = default;
};

// One change of ownership. The signature is the encumbrance: only the owner
// established by the predecessor record can produce it.
struct StateUpdate {
    Digest asset_id;
    uint64_t counter = 0; // 1-based, dense
    Digest prev_digest;
    Bytes new_owner;
    Bytes signature;

    Bytes signing_message() const;
    Digest record_digest() const;

    bool operator==(const StateUpdate&) const = default;
};

// Per-epoch evidence: the commitment the operator made for that epoch, and
// either the asset's place in it or proof that the asset is absent from it.
struct EpochProofComponent {
    uint64_t epoch = 0;
    Digest root;
    uint64_t leaf_count = 0;
    Bytes operator_signature;
    std::optional<uint64_t> entry_index; // certified ledger entry, when mitigated
    std::optional<merkle::InclusionProof> inclusion;
    std::optional<merkle::NonInclusionProof> non_inclusion;

    bool operator==(const EpochProofComponent&) const = default;
};

struct ProofOfProvenance {
    std::string operator_id;
    uint64_t from_epoch = 0;
    uint64_t to_epoch = 0;
    std::vector<EpochProofComponent> components;

    bool operator==(const ProofOfProvenance&) const = default;
};

// The asset is self-contained: it carries its history and the most recent
// proof of provenance, and is passed around by value.
struct UsoAsset {
    GenesisRecord genesis;
    std::vector<StateUpdate> updates;
    std::optional<ProofOfProvenance> proof;

    Digest asset_id() const { return genesis.asset_id(); }
    Digest head_digest() const;
    // Genesis digest followed by each update digest, in order.
    std::vector<Digest> record_digests() const;
};

// What the issuer retains from one issuance: the whole signed genesis when
// transparent, only the blinded message when blind.
struct UsoIssueTranscript {
    IssuePrivacy privacy = IssuePrivacy::TRANSPARENT;
    uint64_t denomination = 0;
    Bytes seen;
};

class UsoIssuer {
public:
    explicit UsoIssuer(DetRng& rng, std::vector<uint64_t> blind_denominations = {1, 5, 10, 50},
                       int modulus_bits = 1024);

    const Bytes& verification_key() const { return signing_.public_key; }
    const std::vector<uint64_t>& blind_denominations() const { return denominations_; }
    Result<Bytes> blind_key(uint64_t denomination) const;

    Bytes sign_genesis(const Bytes& core_message, uint64_t denomination);
    Result<Bytes> blind_sign_genesis(uint64_t denomination, const Bytes& blinded_message);

    const std::vector<UsoIssueTranscript>& transcripts() const { return transcripts_; }

private:
    const crypto::BlindSigner* signer_for(uint64_t denomination) const;

    crypto::KeyPair signing_;
    std::vector<uint64_t> denominations_;
    std::vector<crypto::BlindSigner> blind_signers_;
    std::vector<UsoIssueTranscript> transcripts_;
};

// Verifier-side trust anchors for genesis signatures. Taken from outside the
// asset: a genesis that names its own issuer key would authenticate itself.
struct IssuerTrust {
    Bytes transparent_key;
    std::vector<std::pair<uint64_t, Bytes>> blind_keys; // denomination -> RSA key

    const Bytes* blind_key(uint64_t denomination) const;
};

// A closed epoch as the operator remembers it.
struct ClosedEpoch {
    uint64_t epoch = 0;
    merkle::MerkleTree tree;
    Digest root;
    uint64_t leaf_count = 0;
    Bytes operator_signature;
    std::optional<uint64_t> entry_index;
};

// The operator accumulates (asset_id, record digest) pairs into the open
// epoch and periodically commits them. It never sees anything else: the
// received byte stream is inspectable to prove that.
class UsoOperator {
public:
    UsoOperator(std::string id, Mitigation mitigation, dlt::Network* network, DetRng& rng);

    const std::string& id() const { return id_; }
    Mitigation mitigation() const { return mitigation_; }
    const Bytes& verification_key() const { return keys_.public_key; }
    uint64_t current_epoch() const { return next_epoch_; }
    uint64_t closed_epochs() const { return closed_.size(); }

    // The only write interface assets have to the operator.
    Result<std::monostate> submit_digest(const Digest& asset_id, const Digest& record_digest);

    Result<dlt::EpochCommitmentPayload> close_epoch();

    Result<ProofOfProvenance> prove(const Digest& asset_id, uint64_t from_epoch,
                                    uint64_t to_epoch) const;

    // Adversarial, test-harness op: a second signed commitment for a closed
    // epoch, built over substitute leaves and never published. Subsequent
    // prove_equivocating calls use it for that epoch.
    Result<dlt::EpochCommitmentPayload> equivocate(uint64_t epoch,
                                                   std::vector<merkle::MerkleLeaf> alternate);
    Result<ProofOfProvenance> prove_equivocating(const Digest& asset_id, uint64_t from_epoch,
                                                 uint64_t to_epoch) const;

    const ClosedEpoch* closed_epoch(uint64_t epoch) const;
    const Bytes& received_stream() const { return received_; }

private:
    Result<ProofOfProvenance> prove_impl(const Digest& asset_id, uint64_t from_epoch,
                                         uint64_t to_epoch, bool use_alternate) const;
    EpochProofComponent component_for(const ClosedEpoch& closed, const Digest& asset_id) const;

    std::string id_;
    Mitigation mitigation_;
    dlt::Network* network_;
    crypto::KeyPair keys_;
    uint64_t next_epoch_ = 0;
    std::vector<merkle::MerkleLeaf> pending_;
    std::vector<ClosedEpoch> closed_;
    std::map<uint64_t, ClosedEpoch> alternate_;
    Bytes received_;
};

// Where the verifier gets the authoritative root for an epoch. The DLT
// source answers from certified ledger entries and counts how many it read;
// the self-attested source can only check the operator's own signature on
// whatever root the proof carries.
class CommitmentSource {
public:
    virtual ~CommitmentSource() = default;
    // Authoritative (root, leaf_count) for this component, or nullopt if the
    // component cannot be anchored.
    virtual std::optional<std::pair<Digest, uint64_t>> root_for(
        const std::string& operator_id, const EpochProofComponent& component) = 0;
};

class DltCommitmentSource : public CommitmentSource {
public:
    DltCommitmentSource(const dlt::NetworkMeta& meta, const std::vector<dlt::LedgerEntry>& entries);
    explicit DltCommitmentSource(const dlt::Network& network);

    std::optional<std::pair<Digest, uint64_t>> root_for(
        const std::string& operator_id, const EpochProofComponent& component) override;

    // Ledger entries consulted so far; verification cost is measured in
    // these, not in transactions.
    uint64_t entries_read() const { return entries_read_; }

private:
    dlt::NetworkMeta meta_;
    std::vector<dlt::LedgerEntry> entries_;
    uint64_t entries_read_ = 0;
};

class SelfAttestedCommitmentSource : public CommitmentSource {
public:
    explicit SelfAttestedCommitmentSource(Bytes operator_public);

    std::optional<std::pair<Digest, uint64_t>> root_for(
        const std::string& operator_id, const EpochProofComponent& component) override;

private:
    Bytes operator_public_;
};

// Client-side operations. Assets are value types; these return the grown
// asset rather than mutating shared state.

Result<UsoAsset> issue_asset(UsoIssuer& issuer, UsoOperator& op, uint64_t denomination,
                             const Bytes& owner_public, IssuePrivacy privacy, DetRng& rng);

// Builds and signs the next update without submitting it. The sender key is
// used as given: a wrong key is not detected here (the operator cannot check
// it) but dooms later verification.
StateUpdate make_update(const UsoAsset& asset, const crypto::KeyPair& sender,
                        const Bytes& recipient_public);

// make_update plus submission to the operator; the asset grows only if the
// operator accepted the digest.
Result<StateUpdate> transfer(UsoAsset& asset, const crypto::KeyPair& sender,
                             const Bytes& recipient_public, UsoOperator& op);

// Fetches a proof covering issuance through the operator's last closed epoch
// and attaches it to the asset.
Result<std::monostate> refresh_proof(UsoAsset& asset, const UsoOperator& op);

// Full check, in order: genesis authenticity, chain integrity, encumbrance
// signatures, proof components against the commitment source, continuity.
VerifyStatus verify_asset(const UsoAsset& asset, const IssuerTrust& trust,
                          CommitmentSource& source);

// Line-oriented wire format: one asset, with its history and proof, per
// line. Canonical and byte-stable, so independently built verifiers agree.
std::string to_json_line(const UsoAsset& asset);
std::optional<UsoAsset> asset_from_json_line(const std::string& line);

} // namespace tokenlab::uso
