#include "tokenlab/analysis.hpp"

#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tokenlab::analysis {

using Json = nlohmann::ordered_json;

std::string_view to_string(AuditStatus s) {
    switch (s) {
        case AuditStatus::CLEAN: return "CLEAN";
        case AuditStatus::EQUIVOCATION_FOUND: return "EQUIVOCATION_FOUND";
        case AuditStatus::UNDETECTABLE: return "UNDETECTABLE";
    }
    return "UNKNOWN";
}

namespace {

constexpr size_t kLinkWindow = 16; // half a serial; vanishing false-positive odds

// Entry indices of the transactions reachable backwards from `start` through
// input references — the ancestry an observer can walk on a transparent
// ledger.
std::set<uint64_t> reachable_entries(const std::vector<dlt::LedgerEntry>& entries,
                                     uint64_t start) {
    std::map<Digest, uint64_t> producer; // tx_id -> entry index
    for (const auto& e : entries) {
        if (e.kind != dlt::EntryKind::UTXO_TRANSACTION) continue;
        const auto& tx = std::get<dlt::UtxoPayload>(e.payload);
        if (tx.subtype == dlt::UtxoSubtype::MINT || tx.subtype == dlt::UtxoSubtype::SPEND) {
            producer[tx.tx_id()] = e.index;
        }
    }

    std::set<uint64_t> seen;
    std::vector<uint64_t> frontier{start};
    while (!frontier.empty()) {
        uint64_t index = frontier.back();
        frontier.pop_back();
        if (!seen.insert(index).second) continue;
        const auto& e = entries[index];
        if (e.kind != dlt::EntryKind::UTXO_TRANSACTION) continue;
        const auto& tx = std::get<dlt::UtxoPayload>(e.payload);
        for (const auto& in : tx.inputs) {
            auto it = producer.find(in.tx_id);
            if (it != producer.end()) frontier.push_back(it->second);
        }
    }
    return seen;
}

} // namespace

Result<LinkageReport> linkage_analysis(const LinkageInput& input) {
    for (const auto& [index, view] : input.issuance_views) {
        if (index >= input.entries.size()) {
            return Result<LinkageReport>::rejected(Rejection::INVALID);
        }
    }
    for (const auto& pair : input.pairs) {
        if (pair.issue_entry >= input.entries.size() ||
            pair.redeem_entry >= input.entries.size()) {
            return Result<LinkageReport>::rejected(Rejection::INVALID);
        }
    }

    auto issuance_view = [&input](uint64_t index) -> Bytes {
        for (const auto& [i, view] : input.issuance_views) {
            if (i == index) return view;
        }
        return dlt::canonical_payload(input.entries[index].payload);
    };

    LinkageReport report;
    report.mode = input.mode;
    report.pairs_total = input.pairs.size();
    bool any_graph = false;
    for (const auto& pair : input.pairs) {
        std::set<uint64_t> ancestry = reachable_entries(input.entries, pair.redeem_entry);
        if (ancestry.count(pair.issue_entry) && pair.issue_entry != pair.redeem_entry) {
            ++report.pairs_linked;
            any_graph = true;
            continue;
        }
        Bytes issue_view = issuance_view(pair.issue_entry);
        Bytes redeem_view = dlt::canonical_payload(input.entries[pair.redeem_entry].payload);
        if (shares_substring(ByteSpan(issue_view.data(), issue_view.size()),
                             ByteSpan(redeem_view.data(), redeem_view.size()), kLinkWindow)) {
            ++report.pairs_linked;
        }
    }
    report.method = any_graph ? "graph-path" : "serial-equality";
    return Result<LinkageReport>::ok(std::move(report));
}

EquivocationAuditReport equivocation_audit(const dlt::NetworkMeta& meta,
                                           const std::vector<dlt::LedgerEntry>& entries,
                                           const std::vector<uso::ProofOfProvenance>& proofs) {
    EquivocationAuditReport report;

    std::map<std::pair<std::string, uint64_t>, Digest> certified;
    for (const auto& e : entries) {
        if (e.kind != dlt::EntryKind::EPOCH_COMMITMENT) continue;
        const auto& p = std::get<dlt::EpochCommitmentPayload>(e.payload);
        certified[{p.operator_id, p.epoch}] = p.root;
    }

    auto operator_key = [&meta](const std::string& id) -> const Bytes* {
        for (const auto& [oid, key] : meta.operators) {
            if (oid == id) return &key;
        }
        return nullptr;
    };

    bool unanchored = false;
    std::set<std::tuple<std::string, uint64_t, std::string>> reported;
    for (const auto& proof : proofs) {
        for (const auto& comp : proof.components) {
            auto it = certified.find({proof.operator_id, comp.epoch});
            if (it == certified.end()) {
                unanchored = true;
                continue;
            }
            if (comp.root == it->second) continue;
            // A divergent root only counts as equivocation when the operator
            // actually signed it; anything else is a corrupt proof.
            const Bytes* key = operator_key(proof.operator_id);
            if (!key) continue;
            Bytes msg = dlt::epoch_signing_message(proof.operator_id, comp.epoch, comp.root,
                                                   comp.leaf_count);
            if (!crypto::verify(ByteSpan(key->data(), key->size()),
                                ByteSpan(msg.data(), msg.size()),
                                ByteSpan(comp.operator_signature.data(),
                                         comp.operator_signature.size()))) {
                continue;
            }
            if (reported.insert({proof.operator_id, comp.epoch, comp.root.hex()}).second) {
                report.findings.push_back(
                    {proof.operator_id, comp.epoch, it->second, comp.root});
            }
        }
    }

    if (!report.findings.empty()) {
        report.status = AuditStatus::EQUIVOCATION_FOUND;
    } else if (unanchored) {
        report.status = AuditStatus::UNDETECTABLE;
    } else {
        report.status = AuditStatus::CLEAN;
    }
    return report;
}

std::string linkage_to_json(const LinkageReport& report) {
    Json j;
    j["mode"] = report.mode;
    j["pairs_total"] = report.pairs_total;
    j["pairs_linked"] = report.pairs_linked;
    j["method"] = report.method;
    return j.dump();
}

std::string linkage_to_csv(const std::vector<LinkageReport>& reports) {
    std::ostringstream os;
    os << "mode,pairs_total,pairs_linked,method\n";
    for (const auto& r : reports) {
        os << r.mode << ',' << r.pairs_total << ',' << r.pairs_linked << ',' << r.method << '\n';
    }
    return os.str();
}

std::string growth_to_csv(const std::vector<GrowthReport>& reports) {
    std::ostringstream os;
    os << "mode,transaction_count,ledger_entry_count\n";
    for (const auto& r : reports) {
        for (const auto& p : r.points) {
            os << r.mode << ',' << p.transaction_count << ',' << p.ledger_entry_count << '\n';
        }
    }
    return os.str();
}

std::string audit_to_json(const EquivocationAuditReport& report) {
    Json j;
    j["status"] = std::string(to_string(report.status));
    Json findings = Json::array();
    for (const auto& f : report.findings) {
        Json jf;
        jf["operator_id"] = f.operator_id;
        jf["epoch"] = f.epoch;
        jf["certified_root"] = f.certified_root.hex();
        jf["conflicting_root"] = f.conflicting_root.hex();
        findings.push_back(std::move(jf));
    }
    j["findings"] = std::move(findings);
    return j.dump();
}

} // namespace tokenlab::analysis
