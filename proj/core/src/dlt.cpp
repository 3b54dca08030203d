#include "tokenlab/dlt.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tokenlab::dlt {

using Json = nlohmann::ordered_json;

std::string_view to_string(EntryKind kind) {
    switch (kind) {
        case EntryKind::EXTERNAL_EVIDENCE: return "EXTERNAL_EVIDENCE";
        case EntryKind::INTERLEDGER_TRANSFER: return "INTERLEDGER_TRANSFER";
        case EntryKind::BALANCE_TRANSFER: return "BALANCE_TRANSFER";
        case EntryKind::UTXO_TRANSACTION: return "UTXO_TRANSACTION";
        case EntryKind::EPOCH_COMMITMENT: return "EPOCH_COMMITMENT";
    }
    return "UNKNOWN";
}

std::optional<EntryKind> entry_kind_from_string(std::string_view s) {
    for (uint8_t i = 0; i <= static_cast<uint8_t>(EntryKind::EPOCH_COMMITMENT); ++i) {
        auto k = static_cast<EntryKind>(i);
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view to_string(UtxoSubtype s) {
    switch (s) {
        case UtxoSubtype::MINT: return "MINT";
        case UtxoSubtype::SPEND: return "SPEND";
        case UtxoSubtype::PRIVATE_ISSUE: return "PRIVATE_ISSUE";
        case UtxoSubtype::PRIVATE_SPEND: return "PRIVATE_SPEND";
    }
    return "UNKNOWN";
}

std::optional<UtxoSubtype> utxo_subtype_from_string(std::string_view s) {
    for (uint8_t i = 0; i <= static_cast<uint8_t>(UtxoSubtype::PRIVATE_SPEND); ++i) {
        auto t = static_cast<UtxoSubtype>(i);
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

EntryKind kind_of(const Payload& payload) {
    switch (payload.index()) {
        case 0: return EntryKind::EXTERNAL_EVIDENCE;
        case 1: return EntryKind::INTERLEDGER_TRANSFER;
        case 2: return EntryKind::BALANCE_TRANSFER;
        case 3: return EntryKind::UTXO_TRANSACTION;
        default: return EntryKind::EPOCH_COMMITMENT;
    }
}

namespace {

void write_tx_core(ByteWriter& w, const UtxoPayload& p) {
    w.u8(static_cast<uint8_t>(p.subtype));
    w.u32(static_cast<uint32_t>(p.inputs.size()));
    for (const auto& in : p.inputs) {
        w.raw(in.tx_id).u32(in.output_index);
    }
    w.u32(static_cast<uint32_t>(p.outputs.size()));
    for (const auto& out : p.outputs) {
        w.u64(out.value).var(ByteSpan(out.owner.data(), out.owner.size()));
    }
}

} // namespace

Digest UtxoPayload::tx_id() const {
    ByteWriter w;
    w.var("tokenlab/utxo-tx/v1");
    write_tx_core(w, *this);
    return crypto::hash(w.bytes());
}

Bytes canonical_payload(const Payload& payload) {
    ByteWriter w;
    std::visit(
        [&w](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExternalEvidence>) {
                w.var(p.fiduciary_a).var(p.fiduciary_b).raw(p.tx_digest);
            } else if constexpr (std::is_same_v<T, InterledgerTransfer>) {
                w.var(p.from_account).var(p.to_account).u64(p.amount);
            } else if constexpr (std::is_same_v<T, BalanceTransfer>) {
                w.var(p.from_account).var(p.to_account).u64(p.amount);
            } else if constexpr (std::is_same_v<T, UtxoPayload>) {
                write_tx_core(w, p);
                w.var(ByteSpan(p.authority_signature.data(), p.authority_signature.size()));
                w.u32(static_cast<uint32_t>(p.witnesses.size()));
                for (const auto& wit : p.witnesses) {
                    w.var(ByteSpan(wit.data(), wit.size()));
                }
                w.u64(p.denomination).u64(p.count).raw(p.serial);
            } else if constexpr (std::is_same_v<T, EpochCommitmentPayload>) {
                w.var(p.operator_id).u64(p.epoch).raw(p.root).u64(p.leaf_count);
                w.var(ByteSpan(p.operator_signature.data(), p.operator_signature.size()));
            }
        },
        payload);
    return w.take();
}

Digest entry_digest(uint64_t index, const Payload& payload) {
    ByteWriter w;
    w.var("tokenlab/entry/v1");
    w.u64(index);
    w.u8(static_cast<uint8_t>(kind_of(payload)));
    Bytes body = canonical_payload(payload);
    w.var(ByteSpan(body.data(), body.size()));
    return crypto::hash(w.bytes());
}

Bytes epoch_signing_message(const std::string& operator_id, uint64_t epoch,
                            const Digest& root, uint64_t leaf_count) {
    ByteWriter w;
    w.var("tokenlab/uso-epoch/v1").var(operator_id).u64(epoch).raw(root).u64(leaf_count);
    return w.take();
}

uint64_t AccountState::total() const {
    uint64_t sum = 0;
    for (const auto& [id, bal] : balances) sum += bal;
    return sum;
}

std::string AuditReport::to_string() const {
    if (clean()) return "CLEAN";
    std::ostringstream os;
    os << "entry " << first_violation->index << ": " << first_violation->problem;
    if (first_violation->peer) os << " (peer " << *first_violation->peer << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Network

Network::Network(size_t peer_count, DetRng& rng) {
    if (peer_count == 0) throw std::invalid_argument("network needs at least one peer");
    peers_.reserve(peer_count);
    for (uint32_t id = 0; id < peer_count; ++id) {
        Peer p;
        p.id = id;
        p.keys = crypto::generate_keypair(rng);
        peers_.push_back(std::move(p));
    }
    threshold_ = (2 * peer_count + 2) / 3; // ceil(2N/3)
}

const LedgerEntry* Network::entry_at(uint64_t index) const {
    if (index >= log_.size()) return nullptr;
    return &log_[index];
}

void Network::register_fiduciary(const std::string& id) {
    if (!fiduciary_registered(id)) fiduciaries_.push_back(id);
}

bool Network::fiduciary_registered(const std::string& id) const {
    return std::find(fiduciaries_.begin(), fiduciaries_.end(), id) != fiduciaries_.end();
}

void Network::register_operator(const std::string& id, ByteSpan verification_key) {
    for (auto& [oid, key] : operators_) {
        if (oid == id) {
            key.assign(verification_key.begin(), verification_key.end());
            return;
        }
    }
    operators_.emplace_back(id, Bytes(verification_key.begin(), verification_key.end()));
}

std::optional<Bytes> Network::operator_key(const std::string& id) const {
    for (const auto& [oid, key] : operators_) {
        if (oid == id) return key;
    }
    return std::nullopt;
}

const LedgerEntry* Network::find_epoch_commitment(const std::string& operator_id,
                                                  uint64_t epoch) const {
    for (const auto& entry : log_) {
        if (entry.kind != EntryKind::EPOCH_COMMITMENT) continue;
        const auto& p = std::get<EpochCommitmentPayload>(entry.payload);
        if (p.operator_id == operator_id && p.epoch == epoch) return &entry;
    }
    return nullptr;
}

std::optional<Rejection> Network::validate_shape(const Payload& payload) const {
    std::optional<Rejection> rej;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExternalEvidence>) {
                if (!fiduciary_registered(p.fiduciary_a) || !fiduciary_registered(p.fiduciary_b)) {
                    rej = Rejection::UNKNOWN_PARTY;
                }
            } else if constexpr (std::is_same_v<T, InterledgerTransfer>) {
                if (p.amount == 0 || p.from_account.empty() || p.to_account.empty()) {
                    rej = Rejection::INVALID;
                }
            } else if constexpr (std::is_same_v<T, BalanceTransfer>) {
                if (p.amount == 0 || p.to_account.empty()) rej = Rejection::INVALID;
            } else if constexpr (std::is_same_v<T, UtxoPayload>) {
                switch (p.subtype) {
                    case UtxoSubtype::MINT:
                        if (!p.inputs.empty() || p.outputs.empty()) rej = Rejection::INVALID;
                        break;
                    case UtxoSubtype::SPEND:
                        if (p.inputs.empty() || p.outputs.empty() ||
                            p.witnesses.size() != p.inputs.size()) {
                            rej = Rejection::INVALID;
                        }
                        break;
                    case UtxoSubtype::PRIVATE_ISSUE:
                        if (p.denomination == 0 || p.count == 0) rej = Rejection::INVALID;
                        break;
                    case UtxoSubtype::PRIVATE_SPEND:
                        if (p.denomination == 0) rej = Rejection::INVALID;
                        break;
                }
                if (!rej) {
                    for (const auto& out : p.outputs) {
                        if (out.value == 0) rej = Rejection::INVALID;
                    }
                }
            } else if constexpr (std::is_same_v<T, EpochCommitmentPayload>) {
                auto key = operator_key(p.operator_id);
                if (!key) {
                    rej = Rejection::UNKNOWN_PARTY;
                } else {
                    Bytes msg = epoch_signing_message(p.operator_id, p.epoch, p.root, p.leaf_count);
                    if (!crypto::verify(ByteSpan(key->data(), key->size()),
                                        ByteSpan(msg.data(), msg.size()),
                                        ByteSpan(p.operator_signature.data(),
                                                 p.operator_signature.size()))) {
                        rej = Rejection::BAD_SIGNATURE;
                    } else if (find_epoch_commitment(p.operator_id, p.epoch) != nullptr) {
                        rej = Rejection::DUPLICATE_EPOCH;
                    }
                }
            }
        },
        payload);
    return rej;
}

Result<LedgerEntry> Network::certify_and_append(Payload payload) {
    if (auto rej = validate_shape(payload)) {
        return Result<LedgerEntry>::rejected(*rej);
    }

    LedgerEntry entry;
    entry.index = log_.size();
    entry.kind = kind_of(payload);
    entry.payload = std::move(payload);
    const Digest digest = entry.digest();
    const ByteSpan digest_span = digest.span();

    // Collect one signature per peer over the entry digest. Byzantine peers
    // return a signature over the wrong message; the collector discards
    // anything that does not verify.
    for (const Peer& p : peers_) {
        Bytes sig;
        switch (p.fault) {
            case PeerFault::HONEST:
                sig = crypto::sign(ByteSpan(p.keys.secret_key.data(), p.keys.secret_key.size()),
                                   digest_span);
                break;
            case PeerFault::SILENT:
                continue;
            case PeerFault::EQUIVOCATING: {
                ByteWriter w;
                w.raw(digest).var("equivocation");
                Digest wrong = crypto::hash(w.bytes());
                sig = crypto::sign(ByteSpan(p.keys.secret_key.data(), p.keys.secret_key.size()),
                                   wrong.span());
                break;
            }
        }
        if (crypto::verify(ByteSpan(p.keys.public_key.data(), p.keys.public_key.size()),
                           digest_span, ByteSpan(sig.data(), sig.size()))) {
            entry.quorum_cert.push_back({p.id, std::move(sig)});
        }
    }

    if (entry.quorum_cert.size() < threshold_) {
        return Result<LedgerEntry>::rejected(Rejection::NO_QUORUM);
    }

    for (Peer& p : peers_) {
        if (p.fault == PeerFault::HONEST) p.local_log.push_back(digest);
    }
    log_.push_back(entry);
    return Result<LedgerEntry>::ok(std::move(entry));
}

Result<LedgerEntry> Network::submit(Payload payload) {
    return certify_and_append(std::move(payload));
}

std::vector<QuorumSignature> Network::collect_conflicting_signatures(uint64_t index,
                                                                     const Payload& alt_payload) {
    std::vector<QuorumSignature> sigs;
    const Digest alt = entry_digest(index, alt_payload);
    for (const Peer& p : peers_) {
        // An honest peer signs at most one entry per index, through the
        // certification round; it refuses out-of-protocol requests.
        if (p.fault != PeerFault::EQUIVOCATING) continue;
        Bytes sig = crypto::sign(ByteSpan(p.keys.secret_key.data(), p.keys.secret_key.size()),
                                 alt.span());
        sigs.push_back({p.id, std::move(sig)});
    }
    return sigs;
}

Result<LedgerEntry> Network::record_external_evidence(const std::string& fiduciary_a,
                                                      const std::string& fiduciary_b,
                                                      const Digest& tx_digest) {
    return submit(ExternalEvidence{fiduciary_a, fiduciary_b, tx_digest});
}

Result<LedgerEntry> Network::record_interledger_transfer(const std::string& from_account,
                                                         const std::string& to_account,
                                                         uint64_t amount) {
    return submit(InterledgerTransfer{from_account, to_account, amount});
}

Result<LedgerEntry> Network::apply_balance_transfer(AccountState& state, const std::string& from,
                                                    const std::string& to, uint64_t amount) {
    if (amount == 0) return Result<LedgerEntry>::rejected(Rejection::INVALID);
    if (!state.known(from) || !state.known(to)) {
        return Result<LedgerEntry>::rejected(Rejection::UNKNOWN_PARTY);
    }
    if (state.balance(from) < amount) {
        return Result<LedgerEntry>::rejected(Rejection::INSUFFICIENT_FUNDS);
    }
    auto result = submit(BalanceTransfer{from, to, amount});
    if (result) {
        state.balances[from] -= amount;
        state.balances[to] += amount;
    }
    return result;
}

Result<LedgerEntry> Network::issue_balance(AccountState& state, const std::string& to,
                                           uint64_t amount) {
    if (amount == 0) return Result<LedgerEntry>::rejected(Rejection::INVALID);
    if (!state.known(to)) return Result<LedgerEntry>::rejected(Rejection::UNKNOWN_PARTY);
    auto result = submit(BalanceTransfer{"", to, amount});
    if (result) {
        state.balances[to] += amount;
    }
    return result;
}

AccountState replay_balances(const std::vector<LedgerEntry>& entries) {
    AccountState state;
    for (const auto& entry : entries) {
        if (entry.kind != EntryKind::BALANCE_TRANSFER) continue;
        const auto& t = std::get<BalanceTransfer>(entry.payload);
        if (!state.known(t.to_account)) state.open(t.to_account);
        if (t.is_issuance()) {
            state.balances[t.to_account] += t.amount;
        } else {
            if (!state.known(t.from_account)) state.open(t.from_account);
            state.balances[t.from_account] -= t.amount;
            state.balances[t.to_account] += t.amount;
        }
    }
    return state;
}

NetworkMeta Network::meta() const {
    NetworkMeta m;
    m.peer_count = peers_.size();
    m.threshold = threshold_;
    for (const Peer& p : peers_) {
        m.peer_keys.emplace_back(p.id, p.keys.public_key);
    }
    m.fiduciaries = fiduciaries_;
    m.operators = operators_;
    return m;
}

AuditReport Network::audit() const {
    return audit_entries(meta(), log_);
}

AuditReport audit_entries(const NetworkMeta& meta, const std::vector<LedgerEntry>& entries) {
    AuditReport report;
    auto key_for = [&meta](uint32_t id) -> const Bytes* {
        for (const auto& [pid, key] : meta.peer_keys) {
            if (pid == id) return &key;
        }
        return nullptr;
    };

    for (size_t i = 0; i < entries.size(); ++i) {
        const LedgerEntry& e = entries[i];
        if (e.index != i) {
            report.first_violation = {i, "index not contiguous", std::nullopt};
            return report;
        }
        const Digest digest = e.digest();
        std::set<uint32_t> seen;
        size_t valid = 0;
        for (const auto& qs : e.quorum_cert) {
            if (!seen.insert(qs.peer_id).second) {
                report.first_violation = {i, "duplicate signer in quorum certificate", qs.peer_id};
                return report;
            }
            const Bytes* key = key_for(qs.peer_id);
            if (!key) {
                report.first_violation = {i, "signature from unknown peer", qs.peer_id};
                return report;
            }
            if (!crypto::verify(ByteSpan(key->data(), key->size()), digest.span(),
                                ByteSpan(qs.signature.data(), qs.signature.size()))) {
                report.first_violation = {i, "invalid peer signature", qs.peer_id};
                return report;
            }
            ++valid;
        }
        if (valid < meta.threshold) {
            report.first_violation = {i, "quorum certificate below threshold", std::nullopt};
            return report;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Export / import

namespace {

std::string hex_of(const Bytes& b) {
    return to_hex(ByteSpan(b.data(), b.size()));
}

Json payload_to_json(const Payload& payload) {
    Json j;
    std::visit(
        [&j](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ExternalEvidence>) {
                j["fiduciary_a"] = p.fiduciary_a;
                j["fiduciary_b"] = p.fiduciary_b;
                j["tx_digest"] = p.tx_digest.hex();
            } else if constexpr (std::is_same_v<T, InterledgerTransfer>) {
                j["from_account"] = p.from_account;
                j["to_account"] = p.to_account;
                j["amount"] = p.amount;
            } else if constexpr (std::is_same_v<T, BalanceTransfer>) {
                j["from_account"] = p.from_account;
                j["to_account"] = p.to_account;
                j["amount"] = p.amount;
            } else if constexpr (std::is_same_v<T, UtxoPayload>) {
                j["subtype"] = std::string(to_string(p.subtype));
                switch (p.subtype) {
                    case UtxoSubtype::MINT: {
                        Json outs = Json::array();
                        for (const auto& o : p.outputs) {
                            outs.push_back({{"value", o.value}, {"owner", hex_of(o.owner)}});
                        }
                        j["outputs"] = std::move(outs);
                        j["authority_signature"] = hex_of(p.authority_signature);
                        break;
                    }
                    case UtxoSubtype::SPEND: {
                        Json ins = Json::array();
                        for (const auto& in : p.inputs) {
                            ins.push_back({{"tx_id", in.tx_id.hex()},
                                           {"output_index", in.output_index}});
                        }
                        Json outs = Json::array();
                        for (const auto& o : p.outputs) {
                            outs.push_back({{"value", o.value}, {"owner", hex_of(o.owner)}});
                        }
                        Json wits = Json::array();
                        for (const auto& w : p.witnesses) wits.push_back(hex_of(w));
                        j["inputs"] = std::move(ins);
                        j["outputs"] = std::move(outs);
                        j["witnesses"] = std::move(wits);
                        break;
                    }
                    case UtxoSubtype::PRIVATE_ISSUE:
                        j["denomination"] = p.denomination;
                        j["count"] = p.count;
                        break;
                    case UtxoSubtype::PRIVATE_SPEND:
                        j["denomination"] = p.denomination;
                        j["serial"] = p.serial.hex();
                        break;
                }
            } else if constexpr (std::is_same_v<T, EpochCommitmentPayload>) {
                j["operator_id"] = p.operator_id;
                j["epoch"] = p.epoch;
                j["root"] = p.root.hex();
                j["leaf_count"] = p.leaf_count;
                j["operator_signature"] = hex_of(p.operator_signature);
            }
        },
        payload);
    return j;
}

std::optional<Bytes> bytes_field(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
    return from_hex(j[key].get<std::string>());
}

std::optional<Digest> digest_field(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
    return Digest::from_hex(j[key].get<std::string>());
}

std::optional<Payload> payload_from_json(EntryKind kind, const Json& j) {
    switch (kind) {
        case EntryKind::EXTERNAL_EVIDENCE: {
            auto d = digest_field(j, "tx_digest");
            if (!d) return std::nullopt;
            return Payload(ExternalEvidence{j.value("fiduciary_a", ""),
                                            j.value("fiduciary_b", ""), *d});
        }
        case EntryKind::INTERLEDGER_TRANSFER:
            return Payload(InterledgerTransfer{j.value("from_account", ""),
                                               j.value("to_account", ""),
                                               j.value("amount", uint64_t{0})});
        case EntryKind::BALANCE_TRANSFER:
            return Payload(BalanceTransfer{j.value("from_account", ""),
                                           j.value("to_account", ""),
                                           j.value("amount", uint64_t{0})});
        case EntryKind::UTXO_TRANSACTION: {
            UtxoPayload p;
            auto subtype = utxo_subtype_from_string(j.value("subtype", ""));
            if (!subtype) return std::nullopt;
            p.subtype = *subtype;
            if (j.contains("inputs")) {
                for (const auto& in : j["inputs"]) {
                    auto id = digest_field(in, "tx_id");
                    if (!id) return std::nullopt;
                    p.inputs.push_back({*id, in.value("output_index", uint32_t{0})});
                }
            }
            if (j.contains("outputs")) {
                for (const auto& o : j["outputs"]) {
                    auto owner = bytes_field(o, "owner");
                    if (!owner) return std::nullopt;
                    p.outputs.push_back({o.value("value", uint64_t{0}), std::move(*owner)});
                }
            }
            if (j.contains("witnesses")) {
                for (const auto& w : j["witnesses"]) {
                    auto wit = from_hex(w.get<std::string>());
                    if (!wit) return std::nullopt;
                    p.witnesses.push_back(std::move(*wit));
                }
            }
            if (auto sig = bytes_field(j, "authority_signature")) {
                p.authority_signature = std::move(*sig);
            }
            p.denomination = j.value("denomination", uint64_t{0});
            p.count = j.value("count", uint64_t{0});
            if (auto serial = digest_field(j, "serial")) p.serial = *serial;
            return Payload(std::move(p));
        }
        case EntryKind::EPOCH_COMMITMENT: {
            EpochCommitmentPayload p;
            p.operator_id = j.value("operator_id", "");
            p.epoch = j.value("epoch", uint64_t{0});
            auto root = digest_field(j, "root");
            auto sig = bytes_field(j, "operator_signature");
            if (!root || !sig) return std::nullopt;
            p.root = *root;
            p.leaf_count = j.value("leaf_count", uint64_t{0});
            p.operator_signature = std::move(*sig);
            return Payload(std::move(p));
        }
    }
    return std::nullopt;
}

} // namespace

void Network::export_log(std::ostream& out) const {
    Json header;
    header["format"] = "tokenlab-ledger/1";
    header["peer_count"] = peers_.size();
    header["threshold"] = threshold_;
    Json keys = Json::array();
    for (const Peer& p : peers_) {
        keys.push_back({{"id", p.id}, {"public_key", hex_of(p.keys.public_key)}});
    }
    header["peers"] = std::move(keys);
    Json fids = Json::array();
    for (const auto& f : fiduciaries_) fids.push_back(f);
    header["fiduciaries"] = std::move(fids);
    Json ops = Json::array();
    for (const auto& [id, key] : operators_) {
        ops.push_back({{"id", id}, {"public_key", hex_of(key)}});
    }
    header["operators"] = std::move(ops);
    out << header.dump() << '\n';

    for (const LedgerEntry& e : log_) {
        Json line;
        line["index"] = e.index;
        line["kind"] = std::string(to_string(e.kind));
        line["payload"] = payload_to_json(e.payload);
        Json cert = Json::array();
        for (const auto& qs : e.quorum_cert) {
            cert.push_back({{"peer", qs.peer_id}, {"signature", hex_of(qs.signature)}});
        }
        line["quorum_cert"] = std::move(cert);
        out << line.dump() << '\n';
    }
}

std::optional<ImportedLog> Network::import_log(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;

    ImportedLog imported;
    Json header = Json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "tokenlab-ledger/1") {
        return std::nullopt;
    }
    imported.meta.peer_count = header.value("peer_count", size_t{0});
    imported.meta.threshold = header.value("threshold", size_t{0});
    for (const auto& p : header.value("peers", Json::array())) {
        auto key = bytes_field(p, "public_key");
        if (!key) return std::nullopt;
        imported.meta.peer_keys.emplace_back(p.value("id", uint32_t{0}), std::move(*key));
    }
    for (const auto& f : header.value("fiduciaries", Json::array())) {
        imported.meta.fiduciaries.push_back(f.get<std::string>());
    }
    for (const auto& o : header.value("operators", Json::array())) {
        auto key = bytes_field(o, "public_key");
        if (!key) return std::nullopt;
        imported.meta.operators.emplace_back(o.value("id", ""), std::move(*key));
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        LedgerEntry e;
        e.index = j.value("index", uint64_t{0});
        auto kind = entry_kind_from_string(j.value("kind", ""));
        if (!kind) return std::nullopt;
        e.kind = *kind;
        auto payload = payload_from_json(*kind, j.value("payload", Json::object()));
        if (!payload) return std::nullopt;
        e.payload = std::move(*payload);
        for (const auto& qs : j.value("quorum_cert", Json::array())) {
            auto sig = bytes_field(qs, "signature");
            if (!sig) return std::nullopt;
            e.quorum_cert.push_back({qs.value("peer", uint32_t{0}), std::move(*sig)});
        }
        imported.entries.push_back(std::move(e));
    }
    return imported;
}

} // namespace tokenlab::dlt
