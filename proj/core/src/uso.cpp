#include "tokenlab/uso.hpp"

#include <algorithm>

#include "json.hpp"

namespace tokenlab::uso {

using Json = nlohmann::ordered_json;

std::string_view to_string(IssuePrivacy p) {
    return p == IssuePrivacy::TRANSPARENT ? "transparent" : "blind";
}

std::string_view to_string(Mitigation m) {
    return m == Mitigation::DLT ? "dlt" : "self-attested";
}

std::optional<IssuePrivacy> issue_privacy_from_string(std::string_view s) {
    if (s == "transparent") return IssuePrivacy::TRANSPARENT;
    if (s == "blind") return IssuePrivacy::BLIND;
    return std::nullopt;
}

std::optional<Mitigation> mitigation_from_string(std::string_view s) {
    if (s == "dlt") return Mitigation::DLT;
    if (s == "self-attested") return Mitigation::SELF_ATTESTED;
    return std::nullopt;
}

std::string_view to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::VALID: return "VALID";
        case VerifyStatus::BAD_GENESIS: return "BAD_GENESIS";
        case VerifyStatus::BROKEN_CHAIN: return "BROKEN_CHAIN";
        case VerifyStatus::BAD_ENCUMBRANCE: return "BAD_ENCUMBRANCE";
        case VerifyStatus::PROOF_MISMATCH: return "PROOF_MISMATCH";
        case VerifyStatus::HISTORY_GAP: return "HISTORY_GAP";
    }
    return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// Records

Bytes GenesisRecord::core_message() const {
    ByteWriter w;
    w.var("tokenlab/uso-genesis/v1")
        .var(operator_id)
        .u64(denomination)
        .var(ByteSpan(owner_public.data(), owner_public.size()))
        .u64(issued_epoch)
        .raw(nonce)
        .u8(static_cast<uint8_t>(privacy));
    return w.take();
}

Digest GenesisRecord::record_digest() const {
    ByteWriter w;
    Bytes core = core_message();
    w.var("tokenlab/uso-genesis-record/v1")
        .var(ByteSpan(core.data(), core.size()))
        .var(ByteSpan(issuer_signature.data(), issuer_signature.size()));
    return crypto::hash(w.bytes());
}

Bytes StateUpdate::signing_message() const {
    ByteWriter w;
    w.var("tokenlab/uso-update/v1")
        .raw(asset_id)
        .u64(counter)
        .raw(prev_digest)
        .var(ByteSpan(new_owner.data(), new_owner.size()));
    return w.take();
}

Digest StateUpdate::record_digest() const {
    ByteWriter w;
    Bytes msg = signing_message();
    w.var("tokenlab/uso-update-record/v1")
        .var(ByteSpan(msg.data(), msg.size()))
        .var(ByteSpan(signature.data(), signature.size()));
    return crypto::hash(w.bytes());
}

Digest UsoAsset::head_digest() const {
    return updates.empty() ? genesis.record_digest() : updates.back().record_digest();
}

std::vector<Digest> UsoAsset::record_digests() const {
    std::vector<Digest> digests;
    digests.reserve(1 + updates.size());
    digests.push_back(genesis.record_digest());
    for (const auto& u : updates) digests.push_back(u.record_digest());
    return digests;
}

// ---------------------------------------------------------------------------
// Issuer

UsoIssuer::UsoIssuer(DetRng& rng, std::vector<uint64_t> blind_denominations, int modulus_bits)
    : signing_(crypto::generate_keypair(rng)), denominations_(std::move(blind_denominations)) {
    blind_signers_.reserve(denominations_.size());
    for (size_t i = 0; i < denominations_.size(); ++i) {
        blind_signers_.push_back(crypto::BlindSigner::generate(rng, modulus_bits));
    }
}

const crypto::BlindSigner* UsoIssuer::signer_for(uint64_t denomination) const {
    for (size_t i = 0; i < denominations_.size(); ++i) {
        if (denominations_[i] == denomination) return &blind_signers_[i];
    }
    return nullptr;
}

Result<Bytes> UsoIssuer::blind_key(uint64_t denomination) const {
    const auto* signer = signer_for(denomination);
    if (!signer) return Result<Bytes>::rejected(Rejection::BAD_DENOMINATION);
    return Result<Bytes>::ok(signer->public_key());
}

Bytes UsoIssuer::sign_genesis(const Bytes& core_message, uint64_t denomination) {
    transcripts_.push_back({IssuePrivacy::TRANSPARENT, denomination, core_message});
    return crypto::sign(ByteSpan(signing_.secret_key.data(), signing_.secret_key.size()),
                        ByteSpan(core_message.data(), core_message.size()));
}

Result<Bytes> UsoIssuer::blind_sign_genesis(uint64_t denomination, const Bytes& blinded_message) {
    const auto* signer = signer_for(denomination);
    if (!signer) return Result<Bytes>::rejected(Rejection::BAD_DENOMINATION);
    auto sig = signer->blind_sign(ByteSpan(blinded_message.data(), blinded_message.size()));
    if (!sig) return sig;
    transcripts_.push_back({IssuePrivacy::BLIND, denomination, blinded_message});
    return sig;
}

const Bytes* IssuerTrust::blind_key(uint64_t denomination) const {
    for (const auto& [denom, key] : blind_keys) {
        if (denom == denomination) return &key;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Operator

UsoOperator::UsoOperator(std::string id, Mitigation mitigation, dlt::Network* network, DetRng& rng)
    : id_(std::move(id)),
      mitigation_(mitigation),
      network_(network),
      keys_(crypto::generate_keypair(rng)) {
    if (network_ && mitigation_ == Mitigation::DLT) {
        network_->register_operator(id_, ByteSpan(keys_.public_key.data(),
                                                  keys_.public_key.size()));
    }
}

Result<std::monostate> UsoOperator::submit_digest(const Digest& asset_id,
                                                  const Digest& record_digest) {
    // Everything the operator ever learns flows through these two digests.
    received_.insert(received_.end(), asset_id.bytes.begin(), asset_id.bytes.end());
    received_.insert(received_.end(), record_digest.bytes.begin(), record_digest.bytes.end());
    for (const auto& leaf : pending_) {
        if (leaf.asset_id == asset_id) {
            return Result<std::monostate>::rejected(Rejection::DUPLICATE_IN_EPOCH);
        }
    }
    pending_.push_back({asset_id, record_digest});
    return Result<std::monostate>::ok({});
}

Result<dlt::EpochCommitmentPayload> UsoOperator::close_epoch() {
    merkle::MerkleTree tree(pending_);
    dlt::EpochCommitmentPayload payload;
    payload.operator_id = id_;
    payload.epoch = next_epoch_;
    payload.root = tree.root();
    payload.leaf_count = tree.size();
    Bytes msg = dlt::epoch_signing_message(id_, payload.epoch, payload.root, payload.leaf_count);
    payload.operator_signature =
        crypto::sign(ByteSpan(keys_.secret_key.data(), keys_.secret_key.size()),
                     ByteSpan(msg.data(), msg.size()));

    std::optional<uint64_t> entry_index;
    if (network_ && mitigation_ == Mitigation::DLT) {
        auto entry = network_->submit(payload);
        if (!entry) {
            // Nothing advances: the epoch stays open and can be re-closed.
            return Result<dlt::EpochCommitmentPayload>::rejected(entry.rejection());
        }
        entry_index = entry.value().index;
    }

    closed_.push_back({next_epoch_, std::move(tree), payload.root, payload.leaf_count,
                       payload.operator_signature, entry_index});
    pending_.clear();
    ++next_epoch_;
    return Result<dlt::EpochCommitmentPayload>::ok(std::move(payload));
}

const ClosedEpoch* UsoOperator::closed_epoch(uint64_t epoch) const {
    if (epoch >= closed_.size()) return nullptr;
    return &closed_[epoch];
}

EpochProofComponent UsoOperator::component_for(const ClosedEpoch& closed,
                                               const Digest& asset_id) const {
    EpochProofComponent comp;
    comp.epoch = closed.epoch;
    comp.root = closed.root;
    comp.leaf_count = closed.leaf_count;
    comp.operator_signature = closed.operator_signature;
    comp.entry_index = closed.entry_index;
    if (auto index = closed.tree.index_of(asset_id)) {
        comp.inclusion = closed.tree.prove_inclusion(*index);
    } else {
        comp.non_inclusion = closed.tree.prove_non_inclusion(asset_id);
    }
    return comp;
}

Result<ProofOfProvenance> UsoOperator::prove_impl(const Digest& asset_id, uint64_t from_epoch,
                                                  uint64_t to_epoch, bool use_alternate) const {
    if (from_epoch > to_epoch) return Result<ProofOfProvenance>::rejected(Rejection::INVALID);
    if (to_epoch >= next_epoch_) return Result<ProofOfProvenance>::rejected(Rejection::EPOCH_OPEN);

    ProofOfProvenance proof;
    proof.operator_id = id_;
    proof.from_epoch = from_epoch;
    proof.to_epoch = to_epoch;
    for (uint64_t e = from_epoch; e <= to_epoch; ++e) {
        const ClosedEpoch* source = &closed_[e];
        if (use_alternate) {
            auto it = alternate_.find(e);
            if (it != alternate_.end()) source = &it->second;
        }
        proof.components.push_back(component_for(*source, asset_id));
    }
    return Result<ProofOfProvenance>::ok(std::move(proof));
}

Result<ProofOfProvenance> UsoOperator::prove(const Digest& asset_id, uint64_t from_epoch,
                                             uint64_t to_epoch) const {
    return prove_impl(asset_id, from_epoch, to_epoch, false);
}

Result<ProofOfProvenance> UsoOperator::prove_equivocating(const Digest& asset_id,
                                                          uint64_t from_epoch,
                                                          uint64_t to_epoch) const {
    return prove_impl(asset_id, from_epoch, to_epoch, true);
}

Result<dlt::EpochCommitmentPayload> UsoOperator::equivocate(
    uint64_t epoch, std::vector<merkle::MerkleLeaf> alternate) {
    if (epoch >= closed_.size()) {
        return Result<dlt::EpochCommitmentPayload>::rejected(Rejection::EPOCH_OPEN);
    }
    merkle::MerkleTree tree(std::move(alternate));
    dlt::EpochCommitmentPayload payload;
    payload.operator_id = id_;
    payload.epoch = epoch;
    payload.root = tree.root();
    payload.leaf_count = tree.size();
    Bytes msg = dlt::epoch_signing_message(id_, epoch, payload.root, payload.leaf_count);
    payload.operator_signature =
        crypto::sign(ByteSpan(keys_.secret_key.data(), keys_.secret_key.size()),
                     ByteSpan(msg.data(), msg.size()));
    alternate_.insert_or_assign(
        epoch, ClosedEpoch{epoch, std::move(tree), payload.root, payload.leaf_count,
                           payload.operator_signature, closed_[epoch].entry_index});
    return Result<dlt::EpochCommitmentPayload>::ok(std::move(payload));
}

// ---------------------------------------------------------------------------
// Commitment sources

DltCommitmentSource::DltCommitmentSource(const dlt::NetworkMeta& meta,
                                         const std::vector<dlt::LedgerEntry>& entries)
    : meta_(meta), entries_(entries) {}

DltCommitmentSource::DltCommitmentSource(const dlt::Network& network)
    : meta_(network.meta()), entries_(network.log()) {}

std::optional<std::pair<Digest, uint64_t>> DltCommitmentSource::root_for(
    const std::string& operator_id, const EpochProofComponent& component) {
    // The component itself claims an operator signature over (epoch, root,
    // leaf_count); a carried commitment the operator never signed is a
    // forgery even when a certified root happens to exist for the epoch.
    const Bytes* key = nullptr;
    for (const auto& [oid, k] : meta_.operators) {
        if (oid == operator_id) {
            key = &k;
            break;
        }
    }
    if (!key) return std::nullopt;
    Bytes msg = dlt::epoch_signing_message(operator_id, component.epoch, component.root,
                                           component.leaf_count);
    if (!crypto::verify(ByteSpan(key->data(), key->size()), ByteSpan(msg.data(), msg.size()),
                        ByteSpan(component.operator_signature.data(),
                                 component.operator_signature.size()))) {
        return std::nullopt;
    }

    auto matches = [&](const dlt::LedgerEntry& entry) -> const dlt::EpochCommitmentPayload* {
        if (entry.kind != dlt::EntryKind::EPOCH_COMMITMENT) return nullptr;
        const auto& p = std::get<dlt::EpochCommitmentPayload>(entry.payload);
        if (p.operator_id != operator_id || p.epoch != component.epoch) return nullptr;
        return &p;
    };

    if (component.entry_index) {
        ++entries_read_;
        if (*component.entry_index >= entries_.size()) return std::nullopt;
        if (const auto* p = matches(entries_[*component.entry_index])) {
            return std::make_pair(p->root, p->leaf_count);
        }
        return std::nullopt;
    }
    for (const auto& entry : entries_) {
        ++entries_read_;
        if (const auto* p = matches(entry)) return std::make_pair(p->root, p->leaf_count);
    }
    return std::nullopt;
}

SelfAttestedCommitmentSource::SelfAttestedCommitmentSource(Bytes operator_public)
    : operator_public_(std::move(operator_public)) {}

std::optional<std::pair<Digest, uint64_t>> SelfAttestedCommitmentSource::root_for(
    const std::string& operator_id, const EpochProofComponent& component) {
    // No ledger to ask: the only possible check is that the operator said it.
    Bytes msg = dlt::epoch_signing_message(operator_id, component.epoch, component.root,
                                           component.leaf_count);
    if (!crypto::verify(ByteSpan(operator_public_.data(), operator_public_.size()),
                        ByteSpan(msg.data(), msg.size()),
                        ByteSpan(component.operator_signature.data(),
                                 component.operator_signature.size()))) {
        return std::nullopt;
    }
    return std::make_pair(component.root, component.leaf_count);
}

// ---------------------------------------------------------------------------
// Client operations

Result<UsoAsset> issue_asset(UsoIssuer& issuer, UsoOperator& op, uint64_t denomination,
                             const Bytes& owner_public, IssuePrivacy privacy, DetRng& rng) {
    if (denomination == 0 || owner_public.empty()) {
        return Result<UsoAsset>::rejected(Rejection::INVALID);
    }

    UsoAsset asset;
    asset.genesis.operator_id = op.id();
    asset.genesis.denomination = denomination;
    asset.genesis.owner_public = owner_public;
    asset.genesis.issued_epoch = op.current_epoch();
    asset.genesis.nonce = rng.digest();
    asset.genesis.privacy = privacy;

    Bytes core = asset.genesis.core_message();
    if (privacy == IssuePrivacy::TRANSPARENT) {
        asset.genesis.issuer_signature = issuer.sign_genesis(core, denomination);
    } else {
        auto key = issuer.blind_key(denomination);
        if (!key) return Result<UsoAsset>::rejected(key.rejection());
        auto blinded = crypto::blind(ByteSpan(core.data(), core.size()),
                                     ByteSpan(key.value().data(), key.value().size()), rng);
        auto blind_sig = issuer.blind_sign_genesis(denomination, blinded.blinded_message);
        if (!blind_sig) return Result<UsoAsset>::rejected(blind_sig.rejection());
        asset.genesis.issuer_signature = crypto::unblind(
            ByteSpan(blind_sig.value().data(), blind_sig.value().size()),
            ByteSpan(blinded.unblinding.data(), blinded.unblinding.size()),
            ByteSpan(key.value().data(), key.value().size()));
        if (!crypto::blind_verify(
                ByteSpan(key.value().data(), key.value().size()),
                ByteSpan(core.data(), core.size()),
                ByteSpan(asset.genesis.issuer_signature.data(),
                         asset.genesis.issuer_signature.size()))) {
            return Result<UsoAsset>::rejected(Rejection::BAD_SIGNATURE);
        }
    }

    auto submitted = op.submit_digest(asset.asset_id(), asset.genesis.record_digest());
    if (!submitted) return Result<UsoAsset>::rejected(submitted.rejection());
    return Result<UsoAsset>::ok(std::move(asset));
}

StateUpdate make_update(const UsoAsset& asset, const crypto::KeyPair& sender,
                        const Bytes& recipient_public) {
    StateUpdate update;
    update.asset_id = asset.asset_id();
    update.counter = asset.updates.size() + 1;
    update.prev_digest = asset.head_digest();
    update.new_owner = recipient_public;
    Bytes msg = update.signing_message();
    update.signature = crypto::sign(ByteSpan(sender.secret_key.data(), sender.secret_key.size()),
                                    ByteSpan(msg.data(), msg.size()));
    return update;
}

Result<StateUpdate> transfer(UsoAsset& asset, const crypto::KeyPair& sender,
                             const Bytes& recipient_public, UsoOperator& op) {
    if (recipient_public.empty()) return Result<StateUpdate>::rejected(Rejection::INVALID);
    StateUpdate update = make_update(asset, sender, recipient_public);
    auto submitted = op.submit_digest(update.asset_id, update.record_digest());
    if (!submitted) return Result<StateUpdate>::rejected(submitted.rejection());
    asset.updates.push_back(update);
    return Result<StateUpdate>::ok(std::move(update));
}

Result<std::monostate> refresh_proof(UsoAsset& asset, const UsoOperator& op) {
    if (op.closed_epochs() == 0 || op.closed_epochs() - 1 < asset.genesis.issued_epoch) {
        return Result<std::monostate>::rejected(Rejection::EPOCH_OPEN);
    }
    auto proof = op.prove(asset.asset_id(), asset.genesis.issued_epoch, op.closed_epochs() - 1);
    if (!proof) return Result<std::monostate>::rejected(proof.rejection());
    asset.proof = std::move(proof.value());
    return Result<std::monostate>::ok({});
}

VerifyStatus verify_asset(const UsoAsset& asset, const IssuerTrust& trust,
                          CommitmentSource& source) {
    // 1. Genesis authenticity against the external trust anchor.
    const GenesisRecord& g = asset.genesis;
    if (g.denomination == 0 || g.owner_public.empty()) return VerifyStatus::BAD_GENESIS;
    Bytes core = g.core_message();
    if (g.privacy == IssuePrivacy::TRANSPARENT) {
        if (!crypto::verify(ByteSpan(trust.transparent_key.data(), trust.transparent_key.size()),
                            ByteSpan(core.data(), core.size()),
                            ByteSpan(g.issuer_signature.data(), g.issuer_signature.size()))) {
            return VerifyStatus::BAD_GENESIS;
        }
    } else {
        const Bytes* key = trust.blind_key(g.denomination);
        if (!key || !crypto::blind_verify(
                        ByteSpan(key->data(), key->size()), ByteSpan(core.data(), core.size()),
                        ByteSpan(g.issuer_signature.data(), g.issuer_signature.size()))) {
            return VerifyStatus::BAD_GENESIS;
        }
    }

    // 2. Hash chain and encumbrance signatures.
    const Digest asset_id = asset.asset_id();
    Digest prev = g.record_digest();
    const Bytes* owner = &g.owner_public;
    for (const StateUpdate& u : asset.updates) {
        if (!(u.asset_id == asset_id) || !(u.prev_digest == prev)) {
            return VerifyStatus::BROKEN_CHAIN;
        }
        Bytes msg = u.signing_message();
        if (!crypto::verify(ByteSpan(owner->data(), owner->size()),
                            ByteSpan(msg.data(), msg.size()),
                            ByteSpan(u.signature.data(), u.signature.size()))) {
            return VerifyStatus::BAD_ENCUMBRANCE;
        }
        owner = &u.new_owner;
        prev = u.record_digest();
    }

    // 3. Proof components against authoritative roots. Inclusion components
    // must replay the asset's records in order: the committed history and
    // the carried history must be the same history.
    if (!asset.proof) return VerifyStatus::HISTORY_GAP;
    const ProofOfProvenance& proof = *asset.proof;
    if (proof.operator_id != g.operator_id) return VerifyStatus::PROOF_MISMATCH;
    const std::vector<Digest> records = asset.record_digests();
    size_t next_record = 0;
    for (const EpochProofComponent& comp : proof.components) {
        if (comp.inclusion.has_value() == comp.non_inclusion.has_value()) {
            return VerifyStatus::PROOF_MISMATCH;
        }
        auto authoritative = source.root_for(proof.operator_id, comp);
        if (!authoritative) return VerifyStatus::PROOF_MISMATCH;
        const auto& [root, leaf_count] = *authoritative;
        if (!(comp.root == root) || comp.leaf_count != leaf_count) {
            return VerifyStatus::PROOF_MISMATCH;
        }
        if (comp.inclusion) {
            const merkle::InclusionProof& inc = *comp.inclusion;
            if (!(inc.leaf.asset_id == asset_id)) return VerifyStatus::PROOF_MISMATCH;
            // Pin the audit path to the certified tree: for some positions
            // the path folds to the same root under a padded tree size.
            if (inc.path.tree_size != leaf_count) return VerifyStatus::PROOF_MISMATCH;
            if (!merkle::verify_inclusion(root, inc)) return VerifyStatus::PROOF_MISMATCH;
            if (next_record >= records.size() ||
                !(inc.leaf.record_digest == records[next_record])) {
                return VerifyStatus::PROOF_MISMATCH;
            }
            ++next_record;
        } else {
            if (comp.non_inclusion->tree_size != leaf_count) return VerifyStatus::PROOF_MISMATCH;
            if (!merkle::verify_non_inclusion(root, asset_id, *comp.non_inclusion)) {
                return VerifyStatus::PROOF_MISMATCH;
            }
        }
    }

    // 4. Continuity: coverage starts at the signed issuance epoch, runs
    // dense to the end, consumes every record, and counters are dense.
    if (proof.from_epoch != g.issued_epoch) return VerifyStatus::HISTORY_GAP;
    if (proof.to_epoch < proof.from_epoch) return VerifyStatus::HISTORY_GAP;
    if (proof.components.size() != proof.to_epoch - proof.from_epoch + 1) {
        return VerifyStatus::HISTORY_GAP;
    }
    for (size_t i = 0; i < proof.components.size(); ++i) {
        if (proof.components[i].epoch != proof.from_epoch + i) return VerifyStatus::HISTORY_GAP;
    }
    if (next_record != records.size()) return VerifyStatus::HISTORY_GAP;
    for (size_t i = 0; i < asset.updates.size(); ++i) {
        if (asset.updates[i].counter != i + 1) return VerifyStatus::HISTORY_GAP;
    }
    return VerifyStatus::VALID;
}

// ---------------------------------------------------------------------------
// Serialisation: one asset (with proof) per line, stable key order.

namespace {

std::string hex_of(const Bytes& b) {
    return to_hex(ByteSpan(b.data(), b.size()));
}

Json path_to_json(const merkle::AuditPath& path) {
    Json j;
    j["leaf_index"] = path.leaf_index;
    j["tree_size"] = path.tree_size;
    Json siblings = Json::array();
    for (const auto& s : path.siblings) siblings.push_back(s.hex());
    j["siblings"] = std::move(siblings);
    return j;
}

std::optional<merkle::AuditPath> path_from_json(const Json& j) {
    merkle::AuditPath path;
    path.leaf_index = j.value("leaf_index", uint64_t{0});
    path.tree_size = j.value("tree_size", uint64_t{0});
    for (const auto& s : j.value("siblings", Json::array())) {
        auto d = Digest::from_hex(s.get<std::string>());
        if (!d) return std::nullopt;
        path.siblings.push_back(*d);
    }
    return path;
}

Json inclusion_to_json(const merkle::InclusionProof& inc) {
    Json j;
    j["asset_id"] = inc.leaf.asset_id.hex();
    j["record_digest"] = inc.leaf.record_digest.hex();
    j["path"] = path_to_json(inc.path);
    return j;
}

std::optional<merkle::InclusionProof> inclusion_from_json(const Json& j) {
    merkle::InclusionProof inc;
    auto asset = Digest::from_hex(j.value("asset_id", ""));
    auto record = Digest::from_hex(j.value("record_digest", ""));
    if (!asset || !record || !j.contains("path")) return std::nullopt;
    inc.leaf = {*asset, *record};
    auto path = path_from_json(j["path"]);
    if (!path) return std::nullopt;
    inc.path = std::move(*path);
    return inc;
}

} // namespace

std::string to_json_line(const UsoAsset& asset) {
    Json j;
    Json genesis;
    genesis["operator_id"] = asset.genesis.operator_id;
    genesis["denomination"] = asset.genesis.denomination;
    genesis["owner_public"] = hex_of(asset.genesis.owner_public);
    genesis["issued_epoch"] = asset.genesis.issued_epoch;
    genesis["nonce"] = asset.genesis.nonce.hex();
    genesis["privacy"] = std::string(to_string(asset.genesis.privacy));
    genesis["issuer_signature"] = hex_of(asset.genesis.issuer_signature);
    j["genesis"] = std::move(genesis);

    Json updates = Json::array();
    for (const auto& u : asset.updates) {
        Json ju;
        ju["asset_id"] = u.asset_id.hex();
        ju["counter"] = u.counter;
        ju["prev_digest"] = u.prev_digest.hex();
        ju["new_owner"] = hex_of(u.new_owner);
        ju["signature"] = hex_of(u.signature);
        updates.push_back(std::move(ju));
    }
    j["updates"] = std::move(updates);

    if (asset.proof) {
        Json jp;
        jp["operator_id"] = asset.proof->operator_id;
        jp["from_epoch"] = asset.proof->from_epoch;
        jp["to_epoch"] = asset.proof->to_epoch;
        Json comps = Json::array();
        for (const auto& c : asset.proof->components) {
            Json jc;
            jc["epoch"] = c.epoch;
            jc["root"] = c.root.hex();
            jc["leaf_count"] = c.leaf_count;
            jc["operator_signature"] = hex_of(c.operator_signature);
            if (c.entry_index) jc["entry_index"] = *c.entry_index;
            if (c.inclusion) jc["inclusion"] = inclusion_to_json(*c.inclusion);
            if (c.non_inclusion) {
                Json jn;
                jn["tree_size"] = c.non_inclusion->tree_size;
                if (c.non_inclusion->lower) {
                    jn["lower"] = inclusion_to_json(*c.non_inclusion->lower);
                }
                if (c.non_inclusion->upper) {
                    jn["upper"] = inclusion_to_json(*c.non_inclusion->upper);
                }
                jc["non_inclusion"] = std::move(jn);
            }
            comps.push_back(std::move(jc));
        }
        jp["components"] = std::move(comps);
        j["proof"] = std::move(jp);
    }
    return j.dump();
}

std::optional<UsoAsset> asset_from_json_line(const std::string& line) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("genesis")) return std::nullopt;
    UsoAsset asset;

    const Json& jg = j["genesis"];
    asset.genesis.operator_id = jg.value("operator_id", "");
    asset.genesis.denomination = jg.value("denomination", uint64_t{0});
    auto owner = from_hex(jg.value("owner_public", ""));
    auto nonce = Digest::from_hex(jg.value("nonce", ""));
    auto privacy = issue_privacy_from_string(jg.value("privacy", ""));
    auto sig = from_hex(jg.value("issuer_signature", ""));
    if (!owner || !nonce || !privacy || !sig) return std::nullopt;
    asset.genesis.owner_public = std::move(*owner);
    asset.genesis.issued_epoch = jg.value("issued_epoch", uint64_t{0});
    asset.genesis.nonce = *nonce;
    asset.genesis.privacy = *privacy;
    asset.genesis.issuer_signature = std::move(*sig);

    for (const auto& ju : j.value("updates", Json::array())) {
        StateUpdate u;
        auto asset_id = Digest::from_hex(ju.value("asset_id", ""));
        auto prev = Digest::from_hex(ju.value("prev_digest", ""));
        auto new_owner = from_hex(ju.value("new_owner", ""));
        auto usig = from_hex(ju.value("signature", ""));
        if (!asset_id || !prev || !new_owner || !usig) return std::nullopt;
        u.asset_id = *asset_id;
        u.counter = ju.value("counter", uint64_t{0});
        u.prev_digest = *prev;
        u.new_owner = std::move(*new_owner);
        u.signature = std::move(*usig);
        asset.updates.push_back(std::move(u));
    }

    if (j.contains("proof")) {
        const Json& jp = j["proof"];
        ProofOfProvenance proof;
        proof.operator_id = jp.value("operator_id", "");
        proof.from_epoch = jp.value("from_epoch", uint64_t{0});
        proof.to_epoch = jp.value("to_epoch", uint64_t{0});
        for (const auto& jc : jp.value("components", Json::array())) {
            EpochProofComponent c;
            c.epoch = jc.value("epoch", uint64_t{0});
            auto root = Digest::from_hex(jc.value("root", ""));
            auto osig = from_hex(jc.value("operator_signature", ""));
            if (!root || !osig) return std::nullopt;
            c.root = *root;
            c.leaf_count = jc.value("leaf_count", uint64_t{0});
            c.operator_signature = std::move(*osig);
            if (jc.contains("entry_index")) c.entry_index = jc["entry_index"].get<uint64_t>();
            if (jc.contains("inclusion")) {
                auto inc = inclusion_from_json(jc["inclusion"]);
                if (!inc) return std::nullopt;
                c.inclusion = std::move(*inc);
            }
            if (jc.contains("non_inclusion")) {
                const Json& jn = jc["non_inclusion"];
                merkle::NonInclusionProof ni;
                ni.tree_size = jn.value("tree_size", uint64_t{0});
                if (jn.contains("lower")) {
                    auto lo = inclusion_from_json(jn["lower"]);
                    if (!lo) return std::nullopt;
                    ni.lower = std::move(*lo);
                }
                if (jn.contains("upper")) {
                    auto hi = inclusion_from_json(jn["upper"]);
                    if (!hi) return std::nullopt;
                    ni.upper = std::move(*hi);
                }
                c.non_inclusion = std::move(ni);
            }
            proof.components.push_back(std::move(c));
        }
        asset.proof = std::move(proof);
    }
    return asset;
}

} // namespace tokenlab::uso
