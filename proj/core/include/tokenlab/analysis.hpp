#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tokenlab/bytes.hpp"
#include "tokenlab/dlt.hpp"
#include "tokenlab/result.hpp"
#include "tokenlab/uso.hpp"

namespace tokenlab::analysis {

// Ground-truth pairing of an issuance ledger entry with the redemption entry
// of the same token, known to the scenario that produced them. The analysis
// asks: how many of these pairs can an observer reconstruct?
struct LinkagePair {
    uint64_t issue_entry = 0;
    uint64_t redeem_entry = 0;
};

// Observer-visible inputs only: certified entries, the issuer's own issuance
// transcript (what a colluding issuer could contribute), and the pairs to
// score. No user secrets, no operator-private leaf contents.
struct LinkageInput {
    std::string mode;
    std::vector<dlt::LedgerEntry> entries;
    std::vector<std::pair<uint64_t, Bytes>> issuance_views; // entry index -> issuer view
    std::vector<LinkagePair> pairs;
};

struct LinkageReport {
    std::string mode;
    uint64_t pairs_total = 0;
    uint64_t pairs_linked = 0;
    std::string method; // "graph-path" or "serial-equality"
};

// A pair counts as linked if the redemption can be walked back to the
// issuance through the transaction graph, or if the redemption record and
// the issuance view share a serial-sized byte run.
Result<LinkageReport> linkage_analysis(const LinkageInput& input);

struct GrowthPoint {
    uint64_t transaction_count = 0;
    uint64_t ledger_entry_count = 0;
};

struct GrowthReport {
    std::string mode;
    std::vector<GrowthPoint> points;
};

enum class AuditStatus {
    CLEAN,
    EQUIVOCATION_FOUND,
    UNDETECTABLE, // proofs reference commitments with no ledger ground truth
};

std::string_view to_string(AuditStatus s);

struct EquivocationFinding {
    std::string operator_id;
    uint64_t epoch = 0;
    Digest certified_root;
    Digest conflicting_root;
};

struct EquivocationAuditReport {
    AuditStatus status = AuditStatus::CLEAN;
    std::vector<EquivocationFinding> findings;
};

// Cross-references every proof component against the certified commitment
// for its (operator, epoch). An operator-signed root that contradicts the
// certified one is a finding; components with no certified counterpart make
// the audit undetectable rather than clean.
EquivocationAuditReport equivocation_audit(const dlt::NetworkMeta& meta,
                                           const std::vector<dlt::LedgerEntry>& entries,
                                           const std::vector<uso::ProofOfProvenance>& proofs);

// Deterministic emission: stable key order for the JSON forms, one row per
// series point for the CSV forms.
std::string linkage_to_json(const LinkageReport& report);
std::string linkage_to_csv(const std::vector<LinkageReport>& reports);
std::string growth_to_csv(const std::vector<GrowthReport>& reports);
std::string audit_to_json(const EquivocationAuditReport& report);

} // namespace tokenlab::analysis
