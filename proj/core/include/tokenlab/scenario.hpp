#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tokenlab/dlt.hpp"
#include "tokenlab/uso.hpp"

namespace tokenlab::scenario {

enum class System : uint8_t { UTXO = 0, USO = 1, ACCOUNTS = 2 };
enum class Centralisation : uint8_t { CENTRALISED = 0, DECENTRALISED = 1 };
enum class Privacy : uint8_t { TRANSPARENT = 0, PRIVATE = 1 };

std::string_view to_string(System s);
std::string_view to_string(Centralisation c);
std::string_view to_string(Privacy p);

struct FaultSpec {
    uint32_t peer = 0;
    dlt::PeerFault fault = dlt::PeerFault::SILENT;
};

// One script step. Arguments are carried by name in typed maps so the header
// stays independent of the JSON library; the parser fills them and the
// validator knows which names each op requires.
struct Action {
    std::string op;
    std::map<std::string, std::string> strings;
    std::map<std::string, uint64_t> numbers;
    std::vector<uint64_t> values;     // "values": [...]
    std::vector<std::string> names;   // "recipients": [...]
    std::optional<std::string> expect;
};

struct Scenario {
    std::string name = "scenario";
    System system = System::UTXO;
    Centralisation centralisation = Centralisation::CENTRALISED;
    Privacy privacy = Privacy::TRANSPARENT;
    uso::Mitigation mitigation = uso::Mitigation::SELF_ATTESTED; // USO only
    bool mitigation_explicit = false;
    uint64_t seed = 0;
    size_t peers = 4; // decentralised only
    std::vector<FaultSpec> faults;
    std::vector<uint64_t> denominations = {1, 5, 10, 50};
    int modulus_bits = 1024;
    std::vector<Action> script;

    size_t peer_count() const {
        return centralisation == Centralisation::CENTRALISED ? 1 : peers;
    }
};

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<std::string> violations; // parse errors or validation failures
    bool ok() const { return scenario.has_value() && violations.empty(); }
};

// Parse and fully validate; a returned scenario is runnable. Violations name
// the offending field or script index.
ParseResult parse_scenario(const std::string& text, const std::string& fallback_name);
ParseResult load_scenario(const std::filesystem::path& file);

// Static validation only (quadrant scope, fault configuration, per-op
// argument checks, handle definitions). Empty result means valid.
std::vector<std::string> validate_scenario(const Scenario& scenario);

struct RunOutcome {
    int exit_code = 0;   // 0 ok; 3 an action's expect clause failed
    std::string message; // human-readable failure description, empty on 0
};

// Executes the script sequentially and writes the artifact tree:
//   ledger.log                     certified entries, header + JSONL
//   run_meta.json                  scenario identity, seed, mode label
//   transcripts/events.jsonl       one line per action with its outcome
//   transcripts/issuer.jsonl       issuer-side issuance views
//   transcripts/operator.jsonl     closed-epoch summaries (USO)
//   transcripts/proofs.jsonl       assets with proofs, one per line
//   transcripts/linkage_pairs.jsonl ground-truth issuance/redemption pairs
//   reports/summary.json           outcome counts and final state
//   reports/linkage.json|.csv      observer linkage analysis
//   reports/audit.json             ledger audit + equivocation audit
//   reports/growth.csv             (transactions, entries) point for this run
// Identical (scenario, seed) runs produce byte-identical trees.
RunOutcome run_scenario(const Scenario& scenario, const std::filesystem::path& outdir);

// Recomputes reports/ from the transcripts and ledger in an existing output
// directory; byte-identical to what run_scenario wrote.
RunOutcome regenerate_reports(const std::filesystem::path& outdir);

} // namespace tokenlab::scenario
