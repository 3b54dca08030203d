#include "tokenlab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "tokenlab/analysis.hpp"
#include "tokenlab/utxo.hpp"

namespace tokenlab::scenario {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(System s) {
    switch (s) {
        case System::UTXO: return "utxo";
        case System::USO: return "uso";
        case System::ACCOUNTS: return "accounts";
    }
    return "unknown";
}

std::string_view to_string(Centralisation c) {
    return c == Centralisation::CENTRALISED ? "centralised" : "decentralised";
}

std::string_view to_string(Privacy p) {
    return p == Privacy::TRANSPARENT ? "transparent" : "private";
}

namespace {

std::optional<System> system_from_string(std::string_view s) {
    if (s == "utxo") return System::UTXO;
    if (s == "uso") return System::USO;
    if (s == "accounts") return System::ACCOUNTS;
    return std::nullopt;
}

std::optional<Centralisation> centralisation_from_string(std::string_view s) {
    if (s == "centralised") return Centralisation::CENTRALISED;
    if (s == "decentralised") return Centralisation::DECENTRALISED;
    return std::nullopt;
}

std::optional<Privacy> privacy_from_string(std::string_view s) {
    if (s == "transparent") return Privacy::TRANSPARENT;
    if (s == "private") return Privacy::PRIVATE;
    return std::nullopt;
}

std::optional<dlt::PeerFault> fault_from_string(std::string_view s) {
    if (s == "honest") return dlt::PeerFault::HONEST;
    if (s == "silent") return dlt::PeerFault::SILENT;
    if (s == "equivocating") return dlt::PeerFault::EQUIVOCATING;
    return std::nullopt;
}

std::string hex_of(const Bytes& b) {
    return to_hex(ByteSpan(b.data(), b.size()));
}

} // namespace

// ---------------------------------------------------------------------------
// Parsing

ParseResult parse_scenario(const std::string& text, const std::string& fallback_name) {
    ParseResult result;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        result.violations.push_back(std::string("parse error: ") + e.what());
        return result;
    }
    if (!j.is_object()) {
        result.violations.push_back("scenario must be a JSON object");
        return result;
    }

    Scenario sc;
    sc.name = fallback_name;
    bool seen_seed = false;
    bool seen_system = false;
    bool seen_script = false;
    auto& v = result.violations;

    for (const auto& [key, value] : j.items()) {
        if (key == "name" && value.is_string()) {
            sc.name = value.get<std::string>();
        } else if (key == "system" && value.is_string()) {
            auto s = system_from_string(value.get<std::string>());
            if (!s) {
                v.push_back("unknown system '" + value.get<std::string>() + "'");
            } else {
                sc.system = *s;
                seen_system = true;
            }
        } else if (key == "centralisation" && value.is_string()) {
            auto c = centralisation_from_string(value.get<std::string>());
            if (!c) {
                v.push_back("unknown centralisation '" + value.get<std::string>() + "'");
            } else {
                sc.centralisation = *c;
            }
        } else if (key == "privacy" && value.is_string()) {
            auto p = privacy_from_string(value.get<std::string>());
            if (!p) {
                v.push_back("unknown privacy '" + value.get<std::string>() + "'");
            } else {
                sc.privacy = *p;
            }
        } else if (key == "mitigation" && value.is_string()) {
            auto m = uso::mitigation_from_string(value.get<std::string>());
            if (!m) {
                v.push_back("unknown mitigation '" + value.get<std::string>() + "'");
            } else {
                sc.mitigation = *m;
                sc.mitigation_explicit = true;
            }
        } else if (key == "seed" && value.is_number_integer()) {
            sc.seed = value.get<uint64_t>();
            seen_seed = true;
        } else if (key == "peers" && value.is_number_unsigned()) {
            sc.peers = value.get<size_t>();
        } else if (key == "faults" && value.is_array()) {
            for (const auto& f : value) {
                if (!f.is_object() || !f.contains("peer") || !f.contains("fault") ||
                    !f["fault"].is_string()) {
                    v.push_back("faults entries need numeric 'peer' and string 'fault'");
                    continue;
                }
                auto fault = fault_from_string(f["fault"].get<std::string>());
                if (!fault) {
                    v.push_back("unknown fault '" + f["fault"].get<std::string>() + "'");
                    continue;
                }
                sc.faults.push_back({f["peer"].get<uint32_t>(), *fault});
            }
        } else if (key == "denominations" && value.is_array()) {
            sc.denominations.clear();
            for (const auto& d : value) {
                if (d.is_number_unsigned()) sc.denominations.push_back(d.get<uint64_t>());
            }
        } else if (key == "modulus_bits" && value.is_number_unsigned()) {
            sc.modulus_bits = value.get<int>();
        } else if (key == "script" && value.is_array()) {
            seen_script = true;
            for (size_t i = 0; i < value.size(); ++i) {
                const Json& ja = value[i];
                if (!ja.is_object() || !ja.contains("op") || !ja["op"].is_string()) {
                    v.push_back("script action " + std::to_string(i) +
                                ": every action needs a string 'op'");
                    continue;
                }
                Action a;
                for (const auto& [ak, av] : ja.items()) {
                    if (ak == "op") {
                        a.op = av.get<std::string>();
                    } else if (ak == "expect" && av.is_string()) {
                        a.expect = av.get<std::string>();
                    } else if (av.is_string()) {
                        a.strings[ak] = av.get<std::string>();
                    } else if (av.is_number_integer() && !av.is_number_float()) {
                        if (av.is_number_unsigned() || av.get<int64_t>() >= 0) {
                            a.numbers[ak] = av.get<uint64_t>();
                        } else {
                            v.push_back("script action " + std::to_string(i) + ": field '" +
                                        ak + "' must be non-negative");
                        }
                    } else if (av.is_array()) {
                        bool all_numbers = !av.empty();
                        bool all_strings = !av.empty();
                        for (const auto& el : av) {
                            all_numbers = all_numbers && el.is_number_unsigned();
                            all_strings = all_strings && el.is_string();
                        }
                        if (all_numbers) {
                            for (const auto& el : av) a.values.push_back(el.get<uint64_t>());
                        } else if (all_strings) {
                            for (const auto& el : av) a.names.push_back(el.get<std::string>());
                        } else {
                            v.push_back("script action " + std::to_string(i) + ": array '" +
                                        ak + "' must be all numbers or all strings");
                        }
                    } else {
                        v.push_back("script action " + std::to_string(i) + ": field '" + ak +
                                    "' has an unsupported type");
                    }
                }
                sc.script.push_back(std::move(a));
            }
        } else {
            v.push_back("unknown or mistyped field '" + key + "'");
        }
    }

    if (!seen_system) v.push_back("system required");
    if (!seen_seed) v.push_back("seed required");
    if (!seen_script) v.push_back("script required");

    // Default mitigation mirrors the taxonomy: a decentralised USO operator
    // publishes to the ledger, a centralised one can only self-attest.
    if (sc.system == System::USO && !sc.mitigation_explicit) {
        sc.mitigation = sc.centralisation == Centralisation::DECENTRALISED
                            ? uso::Mitigation::DLT
                            : uso::Mitigation::SELF_ATTESTED;
    }

    if (!v.empty()) return result;
    auto more = validate_scenario(sc);
    v.insert(v.end(), more.begin(), more.end());
    if (v.empty()) result.scenario = std::move(sc);
    return result;
}

ParseResult load_scenario(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        ParseResult result;
        result.violations.push_back("cannot read scenario file: " + file.string());
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), file.stem().string());
}

// ---------------------------------------------------------------------------
// Static validation

namespace {

struct OpSpec {
    std::vector<std::string> strings;
    std::vector<std::string> numbers;
    bool wants_values = false;
    bool wants_names = false;
    bool defines_asset = false;
    bool uses_asset = false;
};

const std::map<std::string, OpSpec>& op_table(System system, Privacy privacy) {
    static const std::map<std::string, OpSpec> common = {
        {"set_fault", {{"fault"}, {"peer"}}},
        {"audit", {}},
    };
    static const std::map<std::string, OpSpec> accounts = {
        {"open", {{"account"}, {}}},
        {"deposit", {{"account"}, {"amount"}}},
        {"pay", {{"from", "to"}, {"amount"}}},
        {"register_fiduciary", {{"id"}, {}}},
        {"evidence", {{"a", "b"}, {}}},
        {"interledger", {{"from", "to"}, {"amount"}}},
    };
    static const std::map<std::string, OpSpec> utxo_transparent = {
        {"mint", {{"owner"}, {}, true, false}},
        {"transfer", {{"from", "to"}, {"amount"}}},
        {"conflict_spend", {{"owner"}, {}, false, true}},
        {"trace", {{"owner"}, {}}},
    };
    static const std::map<std::string, OpSpec> utxo_private = {
        {"withdraw", {{"party"}, {"denomination"}}},
        {"redeem", {{"party"}, {}}},
        {"double_redeem", {{"party"}, {}}},
        {"trace_note", {{"party"}, {}}},
    };
    static const std::map<std::string, OpSpec> uso_ops = {
        {"issue", {{"owner", "asset"}, {"denomination"}, false, false, true, false}},
        {"transfer_asset", {{"asset", "from", "to"}, {}, false, false, false, true}},
        {"close_epoch", {}},
        {"prove", {{"asset"}, {}, false, false, false, true}},
        {"verify", {{"asset"}, {}, false, false, false, true}},
        {"double_spend_asset", {{"asset", "from", "to_a", "to_b"}, {}, false, false, false, true}},
        {"equivocation_attack",
         {{"asset", "from", "victim_a", "victim_b"}, {}, false, false, false, true}},
    };

    static std::map<std::pair<System, Privacy>, std::map<std::string, OpSpec>> cache;
    auto key = std::make_pair(system, privacy);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::map<std::string, OpSpec> table = common;
    switch (system) {
        case System::ACCOUNTS:
            table.insert(accounts.begin(), accounts.end());
            break;
        case System::UTXO:
            if (privacy == Privacy::TRANSPARENT) {
                table.insert(utxo_transparent.begin(), utxo_transparent.end());
            } else {
                table.insert(utxo_private.begin(), utxo_private.end());
            }
            break;
        case System::USO:
            table.insert(uso_ops.begin(), uso_ops.end());
            break;
    }
    return cache.emplace(key, std::move(table)).first->second;
}

} // namespace

std::vector<std::string> validate_scenario(const Scenario& sc) {
    std::vector<std::string> v;

    if (sc.system == System::UTXO && sc.centralisation == Centralisation::DECENTRALISED &&
        sc.privacy == Privacy::PRIVATE) {
        v.push_back("out-of-scope quadrant: utxo + decentralised + private");
    }
    if (sc.system == System::ACCOUNTS && sc.privacy == Privacy::PRIVATE) {
        v.push_back("out-of-scope quadrant: account systems are transparent");
    }
    if (sc.mitigation_explicit && sc.system != System::USO) {
        v.push_back("mitigation applies to uso scenarios only");
    }
    if (sc.centralisation == Centralisation::CENTRALISED && !sc.faults.empty()) {
        v.push_back("faults require a decentralised scenario");
    }
    if (sc.centralisation == Centralisation::DECENTRALISED && (sc.peers < 2 || sc.peers > 64)) {
        v.push_back("peers must be between 2 and 64");
    }
    for (const auto& f : sc.faults) {
        if (f.peer >= sc.peer_count()) {
            v.push_back("fault names peer " + std::to_string(f.peer) + " outside the network");
        }
    }
    if (sc.privacy == Privacy::PRIVATE) {
        if (sc.denominations.empty()) v.push_back("private scenarios need denominations");
        for (uint64_t d : sc.denominations) {
            if (d == 0) v.push_back("denominations must be positive");
        }
    }
    if (sc.modulus_bits < 256 || sc.modulus_bits > 4096 || sc.modulus_bits % 16 != 0) {
        v.push_back("modulus_bits must be a multiple of 16 in [256, 4096]");
    }

    const auto& table = op_table(sc.system, sc.privacy);
    std::set<std::string> assets;
    for (size_t i = 0; i < sc.script.size(); ++i) {
        const Action& a = sc.script[i];
        auto prefix = "script action " + std::to_string(i) + " (op '" + a.op + "'): ";
        auto it = table.find(a.op);
        if (it == table.end()) {
            v.push_back(prefix + "unknown op for this scenario kind");
            continue;
        }
        const OpSpec& spec = it->second;
        for (const auto& name : spec.strings) {
            if (!a.strings.count(name)) v.push_back(prefix + "missing string field '" + name + "'");
        }
        for (const auto& name : spec.numbers) {
            if (!a.numbers.count(name)) {
                v.push_back(prefix + "missing numeric field '" + name + "'");
            }
        }
        if (spec.wants_values && a.values.empty()) {
            v.push_back(prefix + "missing non-empty 'values' array");
        }
        if (spec.wants_names && a.names.size() < 2) {
            v.push_back(prefix + "needs at least two recipients");
        }
        if (a.op == "set_fault") {
            auto fault = a.strings.find("fault");
            if (fault != a.strings.end() && !fault_from_string(fault->second)) {
                v.push_back(prefix + "unknown fault '" + fault->second + "'");
            }
            auto peer = a.numbers.find("peer");
            if (peer != a.numbers.end() && peer->second >= sc.peer_count()) {
                v.push_back(prefix + "peer outside the network");
            }
        }
        if (spec.defines_asset) {
            assets.insert(a.strings.count("asset") ? a.strings.at("asset") : "");
        } else if (spec.uses_asset) {
            auto handle = a.strings.find("asset");
            if (handle != a.strings.end() && !assets.count(handle->second)) {
                v.push_back(prefix + "asset '" + handle->second + "' is never issued");
            }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Runner

namespace {

class Runner {
public:
    Runner(const Scenario& sc, fs::path outdir)
        : sc_(sc), outdir_(std::move(outdir)), rng_(sc.seed), net_(sc.peer_count(), rng_) {
        for (const auto& f : sc_.faults) net_.set_fault(f.peer, f.fault);
        switch (sc_.system) {
            case System::ACCOUNTS:
                break;
            case System::UTXO:
                ledger_.emplace(net_, rng_);
                if (sc_.privacy == Privacy::PRIVATE) {
                    issuer_.emplace(net_, rng_, sc_.denominations, sc_.modulus_bits);
                }
                break;
            case System::USO: {
                std::vector<uint64_t> blind =
                    sc_.privacy == Privacy::PRIVATE ? sc_.denominations : std::vector<uint64_t>{};
                uso_issuer_.emplace(rng_, blind, sc_.modulus_bits);
                uso_op_.emplace("operator-0", sc_.mitigation, &net_, rng_);
                break;
            }
        }
    }

    RunOutcome run() {
        for (size_t i = 0; i < sc_.script.size(); ++i) {
            const Action& a = sc_.script[i];
            Json detail = Json::object();
            std::string outcome = execute(a, detail);
            ++outcome_counts_[outcome];
            Json event;
            event["index"] = i;
            event["op"] = a.op;
            event["outcome"] = outcome;
            event["detail"] = std::move(detail);
            events_.push_back(std::move(event));
            if (a.expect && *a.expect != outcome) {
                write_artifacts();
                return {3, "script action " + std::to_string(i) + " (op '" + a.op +
                               "'): expected outcome '" + *a.expect + "', got '" + outcome + "'"};
            }
        }
        write_artifacts();
        return {0, ""};
    }

private:
    const crypto::KeyPair& party(const std::string& name) {
        auto it = parties_.find(name);
        if (it != parties_.end()) return it->second;
        return parties_.emplace(name, crypto::generate_keypair(rng_)).first->second;
    }

    uint64_t last_entry_index() const { return net_.log().size() - 1; }

    std::string execute(const Action& a, Json& detail) {
        if (a.op == "set_fault") {
            auto fault = fault_from_string(a.strings.at("fault"));
            net_.set_fault(static_cast<uint32_t>(a.numbers.at("peer")), *fault);
            detail["peer"] = a.numbers.at("peer");
            detail["fault"] = a.strings.at("fault");
            return "accepted";
        }
        if (a.op == "audit") return do_audit(detail);

        switch (sc_.system) {
            case System::ACCOUNTS: return execute_accounts(a, detail);
            case System::UTXO:
                return sc_.privacy == Privacy::TRANSPARENT ? execute_utxo(a, detail)
                                                           : execute_private(a, detail);
            case System::USO: return execute_uso(a, detail);
        }
        return std::string(to_string(Rejection::INVALID));
    }

    std::string do_audit(Json& detail) {
        dlt::AuditReport ledger_audit = net_.audit();
        auto equivocation = analysis::equivocation_audit(net_.meta(), net_.log(), proofs_);
        detail["ledger"] = ledger_audit.to_string();
        detail["findings"] = equivocation.findings.size();
        return std::string(analysis::to_string(equivocation.status));
    }

    std::string execute_accounts(const Action& a, Json& detail) {
        if (a.op == "open") {
            const auto& name = a.strings.at("account");
            accounts_.open(name);
            detail["account"] = name;
            return "accepted";
        }
        if (a.op == "deposit") {
            const auto& name = a.strings.at("account");
            auto r = net_.issue_balance(accounts_, name, a.numbers.at("amount"));
            detail["account"] = name;
            detail["amount"] = a.numbers.at("amount");
            return r.outcome();
        }
        if (a.op == "pay") {
            auto r = net_.apply_balance_transfer(accounts_, a.strings.at("from"),
                                                 a.strings.at("to"), a.numbers.at("amount"));
            detail["from"] = a.strings.at("from");
            detail["to"] = a.strings.at("to");
            detail["amount"] = a.numbers.at("amount");
            return r.outcome();
        }
        if (a.op == "register_fiduciary") {
            net_.register_fiduciary(a.strings.at("id"));
            detail["id"] = a.strings.at("id");
            return "accepted";
        }
        if (a.op == "evidence") {
            // The off-ledger transaction itself stays off-ledger; a digest
            // derived from the script position stands in for it.
            Digest tx = crypto::hash("evidence/" + a.strings.at("a") + "/" + a.strings.at("b") +
                                     "/" + std::to_string(events_.size()));
            auto r = net_.record_external_evidence(a.strings.at("a"), a.strings.at("b"), tx);
            detail["a"] = a.strings.at("a");
            detail["b"] = a.strings.at("b");
            detail["tx_digest"] = tx.hex();
            return r.outcome();
        }
        if (a.op == "interledger") {
            auto r = net_.record_interledger_transfer(a.strings.at("from"), a.strings.at("to"),
                                                      a.numbers.at("amount"));
            detail["from"] = a.strings.at("from");
            detail["to"] = a.strings.at("to");
            detail["amount"] = a.numbers.at("amount");
            return r.outcome();
        }
        return std::string(to_string(Rejection::INVALID));
    }

    std::string execute_utxo(const Action& a, Json& detail) {
        if (a.op == "mint") {
            const auto& owner = a.strings.at("owner");
            auto r = ledger_->mint(ByteSpan(party(owner).public_key.data(),
                                            party(owner).public_key.size()),
                                   a.values);
            detail["owner"] = owner;
            detail["values"] = a.values;
            if (r) {
                detail["tx_id"] = r.value().hex();
                const auto* tx = ledger_->transaction(r.value());
                for (uint32_t i = 0; i < tx->outputs.size(); ++i) {
                    mint_entry_[{r.value(), i}] = last_entry_index();
                }
            }
            return r.outcome();
        }
        if (a.op == "transfer") {
            const auto& from = a.strings.at("from");
            const auto& to = a.strings.at("to");
            auto r = ledger_->transfer(party(from),
                                       ByteSpan(party(to).public_key.data(),
                                                party(to).public_key.size()),
                                       a.numbers.at("amount"));
            detail["from"] = from;
            detail["to"] = to;
            detail["amount"] = a.numbers.at("amount");
            if (r) {
                detail["tx_id"] = r.value().hex();
                record_spend_pairs(r.value(), last_entry_index());
            }
            return r.outcome();
        }
        if (a.op == "conflict_spend") {
            return do_conflict_spend(a, detail);
        }
        if (a.op == "trace") {
            const auto& owner = a.strings.at("owner");
            detail["owner"] = owner;
            auto outpoint = first_live_outpoint(owner);
            if (!outpoint) return std::string(to_string(Rejection::UNKNOWN_TOKEN));
            auto r = ledger_->trace(*outpoint);
            if (r) {
                Json ancestry = Json::array();
                for (const auto& d : r.value()) ancestry.push_back(d.hex());
                detail["ancestry"] = std::move(ancestry);
            }
            return r.outcome();
        }
        return std::string(to_string(Rejection::INVALID));
    }

    std::optional<dlt::UtxoOutPoint> first_live_outpoint(const std::string& owner) {
        const Bytes& key = party(owner).public_key;
        for (const auto& [outpoint, output] : ledger_->live()) {
            if (output.owner == key) return outpoint;
        }
        return std::nullopt;
    }

    void record_spend_pairs(const Digest& tx_id, uint64_t entry_index) {
        const auto* tx = ledger_->transaction(tx_id);
        if (!tx) return;
        for (const auto& in : tx->inputs) {
            auto it = mint_entry_.find(in);
            if (it == mint_entry_.end()) continue;
            pairs_.push_back({it->second, entry_index});
            mint_entry_.erase(it);
        }
    }

    std::string do_conflict_spend(const Action& a, Json& detail) {
        const auto& owner = a.strings.at("owner");
        detail["owner"] = owner;
        auto outpoint = first_live_outpoint(owner);
        if (!outpoint) return std::string(to_string(Rejection::UNKNOWN_TOKEN));
        uint64_t value = ledger_->live().at(*outpoint).value;

        // All spends name the same input, so at most one can land.
        std::vector<std::string> outcomes;
        Json tx_ids = Json::array();
        for (const auto& recipient : a.names) {
            dlt::UtxoOutput out{value, party(recipient).public_key};
            auto tx = utxo::UtxoLedger::make_spend({*outpoint}, {out}, {party(owner)});
            auto r = ledger_->submit_spend(tx);
            outcomes.push_back(r.outcome());
            tx_ids.push_back(tx.tx_id().hex());
            if (r) record_spend_pairs(r.value(), last_entry_index());
        }
        detail["tx_ids"] = std::move(tx_ids);
        Json jout = Json::array();
        std::string joined;
        for (const auto& o : outcomes) {
            jout.push_back(o);
            if (!joined.empty()) joined += ',';
            joined += o;
        }
        detail["outcomes"] = std::move(jout);
        return joined;
    }

    std::string execute_private(const Action& a, Json& detail) {
        const auto& who = a.strings.at("party");
        detail["party"] = who;
        if (a.op == "withdraw") {
            uint64_t denom = a.numbers.at("denomination");
            detail["denomination"] = denom;
            auto key = issuer_->issuer_public(denom);
            if (!key) return key.outcome();
            auto pending = utxo::request_note(denom, key.value(), rng_);
            if (!pending) return pending.outcome();
            auto blind_sig = issuer_->issue(denom, pending.value().blinding.blinded_message);
            if (!blind_sig) return blind_sig.outcome();
            uint64_t issue_index = last_entry_index();
            auto note = utxo::finish_note(pending.value(), blind_sig.value(), key.value());
            if (!note) return note.outcome();
            serial_issue_entry_[note.value().serial.hex()] = issue_index;
            issuance_views_.emplace_back(issue_index, pending.value().blinding.blinded_message);
            wallets_[who].push_back(std::move(note.value()));
            return "accepted";
        }
        if (a.op == "redeem" || a.op == "double_redeem") {
            auto& notes = wallets_[who];
            if (notes.empty()) return std::string(to_string(Rejection::UNKNOWN_TOKEN));
            utxo::Note note = notes.front();
            notes.erase(notes.begin());
            detail["denomination"] = note.denomination;
            detail["serial"] = note.serial.hex();
            size_t attempts = a.op == "double_redeem" ? 2 : 1;
            std::vector<std::string> outcomes;
            for (size_t i = 0; i < attempts; ++i) {
                auto r = issuer_->redeem(note);
                outcomes.push_back(r.outcome());
                if (r) {
                    auto it = serial_issue_entry_.find(note.serial.hex());
                    if (it != serial_issue_entry_.end()) {
                        pairs_.push_back({it->second, last_entry_index()});
                    }
                }
            }
            std::string joined;
            for (const auto& o : outcomes) {
                if (!joined.empty()) joined += ',';
                joined += o;
            }
            return joined;
        }
        if (a.op == "trace_note") {
            auto& notes = wallets_[who];
            if (notes.empty()) return std::string(to_string(Rejection::UNKNOWN_TOKEN));
            return issuer_->trace_note(notes.front()).outcome();
        }
        return std::string(to_string(Rejection::INVALID));
    }

    // -- USO -----------------------------------------------------------------

    uso::IssuerTrust trust() const {
        uso::IssuerTrust t;
        t.transparent_key = uso_issuer_->verification_key();
        for (uint64_t d : uso_issuer_->blind_denominations()) {
            auto key = uso_issuer_->blind_key(d);
            if (key) t.blind_keys.emplace_back(d, key.value());
        }
        return t;
    }

    uso::VerifyStatus verify_against_source(const uso::UsoAsset& asset) {
        uso::IssuerTrust t = trust();
        if (sc_.mitigation == uso::Mitigation::DLT) {
            uso::DltCommitmentSource source(net_);
            return uso::verify_asset(asset, t, source);
        }
        uso::SelfAttestedCommitmentSource source(uso_op_->verification_key());
        return uso::verify_asset(asset, t, source);
    }

    void collect_asset(const uso::UsoAsset& asset) {
        if (asset.proof) proofs_.push_back(*asset.proof);
        proof_lines_.push_back(uso::to_json_line(asset));
    }

    std::string do_close_epoch(Json& detail) {
        uint64_t epoch = uso_op_->current_epoch();
        auto r = uso_op_->close_epoch();
        detail["epoch"] = epoch;
        if (!r) return r.outcome();
        detail["root"] = r.value().root.hex();
        detail["leaf_count"] = r.value().leaf_count;
        if (sc_.mitigation == uso::Mitigation::DLT) {
            uint64_t entry = last_entry_index();
            detail["entry_index"] = entry;
            for (const auto& handle : issued_this_epoch_) {
                asset_issue_entry_[handle] = entry;
                auto view = pending_views_.find(handle);
                if (view != pending_views_.end()) {
                    issuance_views_.emplace_back(entry, view->second);
                    pending_views_.erase(view);
                }
            }
            for (const auto& handle : transferred_this_epoch_) {
                auto it = asset_issue_entry_.find(handle);
                if (it != asset_issue_entry_.end()) pairs_.push_back({it->second, entry});
            }
        }
        Json line;
        line["epoch"] = epoch;
        line["root"] = r.value().root.hex();
        line["leaf_count"] = r.value().leaf_count;
        if (sc_.mitigation == uso::Mitigation::DLT) line["entry_index"] = last_entry_index();
        operator_lines_.push_back(line.dump());
        issued_this_epoch_.clear();
        transferred_this_epoch_.clear();
        return "accepted";
    }

    std::string execute_uso(const Action& a, Json& detail) {
        if (a.op == "issue") {
            const auto& owner = a.strings.at("owner");
            const auto& handle = a.strings.at("asset");
            uint64_t denom = a.numbers.at("denomination");
            auto privacy = sc_.privacy == Privacy::PRIVATE ? uso::IssuePrivacy::BLIND
                                                           : uso::IssuePrivacy::TRANSPARENT;
            auto r = uso::issue_asset(*uso_issuer_, *uso_op_, denom, party(owner).public_key,
                                      privacy, rng_);
            detail["owner"] = owner;
            detail["asset"] = handle;
            detail["denomination"] = denom;
            if (r) {
                detail["asset_id"] = r.value().asset_id().hex();
                assets_[handle] = std::move(r.value());
                issued_this_epoch_.push_back(handle);
                if (privacy == uso::IssuePrivacy::BLIND) {
                    pending_views_[handle] = uso_issuer_->transcripts().back().seen;
                }
                ++uso_tx_count_;
            }
            return r.outcome();
        }
        if (a.op == "transfer_asset") {
            const auto& handle = a.strings.at("asset");
            const auto& from = a.strings.at("from");
            const auto& to = a.strings.at("to");
            auto r = uso::transfer(assets_.at(handle), party(from), party(to).public_key,
                                   *uso_op_);
            detail["asset"] = handle;
            detail["from"] = from;
            detail["to"] = to;
            if (r) {
                detail["counter"] = r.value().counter;
                if (std::find(transferred_this_epoch_.begin(), transferred_this_epoch_.end(),
                              handle) == transferred_this_epoch_.end()) {
                    transferred_this_epoch_.push_back(handle);
                }
                ++uso_tx_count_;
            }
            return r.outcome();
        }
        if (a.op == "close_epoch") return do_close_epoch(detail);
        if (a.op == "prove") {
            const auto& handle = a.strings.at("asset");
            detail["asset"] = handle;
            auto r = uso::refresh_proof(assets_.at(handle), *uso_op_);
            if (r) collect_asset(assets_.at(handle));
            return r.outcome();
        }
        if (a.op == "verify") {
            const auto& handle = a.strings.at("asset");
            detail["asset"] = handle;
            auto refreshed = uso::refresh_proof(assets_.at(handle), *uso_op_);
            if (!refreshed) return refreshed.outcome();
            auto status = verify_against_source(assets_.at(handle));
            collect_asset(assets_.at(handle));
            detail["status"] = std::string(uso::to_string(status));
            return std::string(uso::to_string(status));
        }
        if (a.op == "double_spend_asset") return do_double_spend_asset(a, detail);
        if (a.op == "equivocation_attack") return do_equivocation_attack(a, detail);
        return std::string(to_string(Rejection::INVALID));
    }

    std::string do_double_spend_asset(const Action& a, Json& detail) {
        const auto& handle = a.strings.at("asset");
        const auto& from = a.strings.at("from");
        uso::UsoAsset base = assets_.at(handle);
        detail["asset"] = handle;

        uso::UsoAsset asset_a = base;
        auto first = uso::transfer(asset_a, party(from), party(a.strings.at("to_a")).public_key,
                                   *uso_op_);
        if (!first) return first.outcome();
        ++uso_tx_count_;
        Json close_detail = Json::object();
        std::string closed = do_close_epoch(close_detail);
        if (closed != "accepted") return closed;

        // The conflicting update lands in the next epoch; the commitments now
        // disagree with at least one carried history.
        uso::UsoAsset asset_b = base;
        auto second = uso::transfer(asset_b, party(from), party(a.strings.at("to_b")).public_key,
                                    *uso_op_);
        if (!second) return second.outcome();
        ++uso_tx_count_;
        close_detail = Json::object();
        closed = do_close_epoch(close_detail);
        if (closed != "accepted") return closed;

        auto ra = uso::refresh_proof(asset_a, *uso_op_);
        auto rb = uso::refresh_proof(asset_b, *uso_op_);
        if (!ra || !rb) return (!ra ? ra : rb).outcome();
        auto status_a = verify_against_source(asset_a);
        auto status_b = verify_against_source(asset_b);
        collect_asset(asset_a);
        collect_asset(asset_b);
        detail["status_a"] = std::string(uso::to_string(status_a));
        detail["status_b"] = std::string(uso::to_string(status_b));
        assets_[handle] = std::move(asset_a);
        return std::string(uso::to_string(status_a)) + "," +
               std::string(uso::to_string(status_b));
    }

    std::string do_equivocation_attack(const Action& a, Json& detail) {
        const auto& handle = a.strings.at("asset");
        const auto& from = a.strings.at("from");
        uso::UsoAsset base = assets_.at(handle);
        detail["asset"] = handle;

        // Honest branch: the real transfer, committed normally.
        uso::UsoAsset asset_a = base;
        auto real = uso::transfer(asset_a, party(from), party(a.strings.at("victim_a")).public_key,
                                  *uso_op_);
        if (!real) return real.outcome();
        ++uso_tx_count_;
        Json close_detail = Json::object();
        std::string closed = do_close_epoch(close_detail);
        if (closed != "accepted") return closed;
        uint64_t attacked_epoch = uso_op_->closed_epochs() - 1;

        // Shadow branch: a conflicting update that is never submitted; the
        // operator instead signs an alternate commitment containing it.
        uso::UsoAsset asset_b = base;
        uso::StateUpdate shadow =
            uso::make_update(asset_b, party(from), party(a.strings.at("victim_b")).public_key);
        asset_b.updates.push_back(shadow);
        std::vector<merkle::MerkleLeaf> alternate = uso_op_->closed_epoch(attacked_epoch)
                                                        ->tree.leaves();
        for (auto& leaf : alternate) {
            if (leaf.asset_id == base.asset_id()) leaf.record_digest = shadow.record_digest();
        }
        auto alt = uso_op_->equivocate(attacked_epoch, std::move(alternate));
        if (!alt) return alt.outcome();
        detail["alternate_root"] = alt.value().root.hex();

        auto ra = uso::refresh_proof(asset_a, *uso_op_);
        if (!ra) return ra.outcome();
        auto proof_b = uso_op_->prove_equivocating(asset_b.asset_id(),
                                                   asset_b.genesis.issued_epoch,
                                                   uso_op_->closed_epochs() - 1);
        if (!proof_b) return proof_b.outcome();
        asset_b.proof = std::move(proof_b.value());

        auto status_a = verify_against_source(asset_a);
        auto status_b = verify_against_source(asset_b);
        collect_asset(asset_a);
        collect_asset(asset_b);
        detail["status_victim_a"] = std::string(uso::to_string(status_a));
        detail["status_victim_b"] = std::string(uso::to_string(status_b));

        if (sc_.mitigation == uso::Mitigation::DLT) {
            // The ledger's uniqueness rule blocks certifying the second root.
            auto publish = net_.submit(alt.value());
            detail["publish_alternate"] = publish.outcome();
        }
        assets_[handle] = std::move(asset_a);
        return std::string(uso::to_string(status_a)) + "," +
               std::string(uso::to_string(status_b));
    }

    // -- artifacts ------------------------------------------------------------

    std::string mode_label() const {
        return std::string(to_string(sc_.system)) + "-" + std::string(to_string(sc_.privacy));
    }

    uint64_t transaction_count() const {
        if (sc_.system == System::USO) return uso_tx_count_;
        uint64_t count = 0;
        for (const auto& e : net_.log()) {
            if (sc_.system == System::UTXO && e.kind == dlt::EntryKind::UTXO_TRANSACTION) ++count;
            if (sc_.system == System::ACCOUNTS &&
                (e.kind == dlt::EntryKind::BALANCE_TRANSFER ||
                 e.kind == dlt::EntryKind::INTERLEDGER_TRANSFER)) {
                ++count;
            }
        }
        return count;
    }

    void write_file(const fs::path& path, const std::string& content) const {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }

    void write_artifacts() {
        fs::create_directories(outdir_ / "transcripts");
        fs::create_directories(outdir_ / "reports");

        {
            std::ofstream out(outdir_ / "ledger.log", std::ios::binary);
            net_.export_log(out);
        }

        Json meta;
        meta["format"] = "tokenlab-run/1";
        meta["name"] = sc_.name;
        meta["system"] = std::string(to_string(sc_.system));
        meta["centralisation"] = std::string(to_string(sc_.centralisation));
        meta["privacy"] = std::string(to_string(sc_.privacy));
        if (sc_.system == System::USO) {
            meta["mitigation"] = std::string(uso::to_string(sc_.mitigation));
        }
        meta["seed"] = sc_.seed;
        meta["peers"] = sc_.peer_count();
        meta["mode_label"] = mode_label();
        meta["transaction_count"] = transaction_count();
        write_file(outdir_ / "run_meta.json", meta.dump(2) + "\n");

        std::ostringstream events;
        for (const auto& e : events_) events << e.dump() << '\n';
        write_file(outdir_ / "transcripts" / "events.jsonl", events.str());

        std::ostringstream issuer_lines;
        if (sc_.system == System::UTXO && issuer_) {
            for (const auto& t : issuer_->issue_transcripts()) {
                Json line;
                line["entry_index"] = t.entry_index;
                line["denomination"] = t.denomination;
                line["view"] = hex_of(t.blinded_message);
                issuer_lines << line.dump() << '\n';
            }
        } else if (sc_.system == System::USO && uso_issuer_) {
            for (const auto& t : uso_issuer_->transcripts()) {
                Json line;
                line["privacy"] = std::string(uso::to_string(t.privacy));
                line["denomination"] = t.denomination;
                line["view"] = hex_of(t.seen);
                issuer_lines << line.dump() << '\n';
            }
        }
        write_file(outdir_ / "transcripts" / "issuer.jsonl", issuer_lines.str());

        std::ostringstream operator_lines;
        for (const auto& line : operator_lines_) operator_lines << line << '\n';
        write_file(outdir_ / "transcripts" / "operator.jsonl", operator_lines.str());

        std::ostringstream proof_lines;
        for (const auto& line : proof_lines_) proof_lines << line << '\n';
        write_file(outdir_ / "transcripts" / "proofs.jsonl", proof_lines.str());

        std::ostringstream pair_lines;
        for (const auto& p : pairs_) {
            Json line;
            line["issue_entry"] = p.issue_entry;
            line["redeem_entry"] = p.redeem_entry;
            pair_lines << line.dump() << '\n';
        }
        for (const auto& [index, view] : issuance_views_) {
            Json line;
            line["issuance_entry"] = index;
            line["issuance_view"] = hex_of(view);
            pair_lines << line.dump() << '\n';
        }
        write_file(outdir_ / "transcripts" / "linkage_pairs.jsonl", pair_lines.str());

        write_reports();
        write_summary();
    }

    void write_reports() {
        analysis::LinkageInput input;
        input.mode = mode_label();
        input.entries = net_.log();
        input.issuance_views = issuance_views_;
        input.pairs = pairs_;
        auto linkage = analysis::linkage_analysis(input);
        if (linkage) {
            write_file(outdir_ / "reports" / "linkage.json",
                       analysis::linkage_to_json(linkage.value()) + "\n");
            write_file(outdir_ / "reports" / "linkage.csv",
                       analysis::linkage_to_csv({linkage.value()}));
        }

        dlt::AuditReport ledger_audit = net_.audit();
        auto equivocation = analysis::equivocation_audit(net_.meta(), net_.log(), proofs_);
        Json audit;
        audit["ledger"] = ledger_audit.to_string();
        audit["equivocation"] = Json::parse(analysis::audit_to_json(equivocation));
        write_file(outdir_ / "reports" / "audit.json", audit.dump(2) + "\n");

        analysis::GrowthReport growth;
        growth.mode = mode_label();
        growth.points.push_back({transaction_count(), net_.log().size()});
        write_file(outdir_ / "reports" / "growth.csv", analysis::growth_to_csv({growth}));
    }

    void write_summary() {
        Json summary;
        summary["name"] = sc_.name;
        summary["system"] = std::string(to_string(sc_.system));
        summary["centralisation"] = std::string(to_string(sc_.centralisation));
        summary["privacy"] = std::string(to_string(sc_.privacy));
        if (sc_.system == System::USO) {
            summary["mitigation"] = std::string(uso::to_string(sc_.mitigation));
        }
        summary["seed"] = sc_.seed;
        summary["actions"] = sc_.script.size();
        summary["ledger_entries"] = net_.log().size();
        Json outcomes;
        for (const auto& [name, count] : outcome_counts_) outcomes[name] = count;
        summary["outcomes"] = std::move(outcomes);

        Json final_state;
        switch (sc_.system) {
            case System::ACCOUNTS: {
                Json balances;
                for (const auto& [name, amount] : accounts_.balances) balances[name] = amount;
                final_state["balances"] = std::move(balances);
                final_state["total"] = accounts_.total();
                break;
            }
            case System::UTXO:
                final_state["live_outputs"] = ledger_->live().size();
                final_state["spent_outputs"] = ledger_->spent().size();
                if (issuer_) {
                    final_state["redeemed_serials"] = issuer_->spent_serials().size();
                }
                break;
            case System::USO:
                final_state["closed_epochs"] = uso_op_->closed_epochs();
                final_state["assets"] = assets_.size();
                final_state["operator_received_bytes"] = uso_op_->received_stream().size();
                break;
        }
        summary["final"] = std::move(final_state);
        write_file(outdir_ / "reports" / "summary.json", summary.dump(2) + "\n");
    }

    const Scenario& sc_;
    fs::path outdir_;
    DetRng rng_;
    dlt::Network net_;
    dlt::AccountState accounts_;
    std::optional<utxo::UtxoLedger> ledger_;
    std::optional<utxo::PrivateIssuer> issuer_;
    std::optional<uso::UsoIssuer> uso_issuer_;
    std::optional<uso::UsoOperator> uso_op_;

    std::map<std::string, crypto::KeyPair> parties_;
    std::map<std::string, std::vector<utxo::Note>> wallets_;
    std::map<std::string, uso::UsoAsset> assets_;

    std::map<dlt::UtxoOutPoint, uint64_t> mint_entry_;
    std::map<std::string, uint64_t> serial_issue_entry_;
    std::map<std::string, uint64_t> asset_issue_entry_;
    std::map<std::string, Bytes> pending_views_;
    std::vector<std::string> issued_this_epoch_;
    std::vector<std::string> transferred_this_epoch_;
    std::vector<analysis::LinkagePair> pairs_;
    std::vector<std::pair<uint64_t, Bytes>> issuance_views_;
    std::vector<uso::ProofOfProvenance> proofs_;
    std::vector<std::string> proof_lines_;
    std::vector<std::string> operator_lines_;
    std::vector<Json> events_;
    std::map<std::string, uint64_t> outcome_counts_;
    uint64_t uso_tx_count_ = 0;
};

} // namespace

RunOutcome run_scenario(const Scenario& scenario, const fs::path& outdir) {
    Runner runner(scenario, outdir);
    return runner.run();
}

// ---------------------------------------------------------------------------
// Report regeneration from artifacts

RunOutcome regenerate_reports(const fs::path& outdir) {
    std::ifstream meta_in(outdir / "run_meta.json", std::ios::binary);
    if (!meta_in) return {2, "missing run_meta.json in " + outdir.string()};
    Json meta = Json::parse(meta_in, nullptr, false);
    if (meta.is_discarded() || meta.value("format", "") != "tokenlab-run/1") {
        return {2, "unrecognised run_meta.json in " + outdir.string()};
    }

    std::ifstream ledger_in(outdir / "ledger.log", std::ios::binary);
    if (!ledger_in) return {2, "missing ledger.log in " + outdir.string()};
    auto imported = dlt::Network::import_log(ledger_in);
    if (!imported) return {2, "unreadable ledger.log in " + outdir.string()};

    std::vector<analysis::LinkagePair> pairs;
    std::vector<std::pair<uint64_t, Bytes>> views;
    std::ifstream pairs_in(outdir / "transcripts" / "linkage_pairs.jsonl", std::ios::binary);
    std::string line;
    while (pairs_in && std::getline(pairs_in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) return {2, "unreadable linkage_pairs.jsonl"};
        if (j.contains("issue_entry")) {
            pairs.push_back({j.value("issue_entry", uint64_t{0}),
                             j.value("redeem_entry", uint64_t{0})});
        } else if (j.contains("issuance_entry")) {
            auto view = from_hex(j.value("issuance_view", ""));
            if (!view) return {2, "unreadable issuance view"};
            views.emplace_back(j.value("issuance_entry", uint64_t{0}), std::move(*view));
        }
    }

    std::vector<uso::ProofOfProvenance> proofs;
    std::ifstream proofs_in(outdir / "transcripts" / "proofs.jsonl", std::ios::binary);
    while (proofs_in && std::getline(proofs_in, line)) {
        if (line.empty()) continue;
        auto asset = uso::asset_from_json_line(line);
        if (!asset) return {2, "unreadable proofs.jsonl"};
        if (asset->proof) proofs.push_back(*asset->proof);
    }

    analysis::LinkageInput input;
    input.mode = meta.value("mode_label", "");
    input.entries = imported->entries;
    input.issuance_views = std::move(views);
    input.pairs = std::move(pairs);
    auto linkage = analysis::linkage_analysis(input);

    auto write_file = [](const fs::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    };

    fs::create_directories(outdir / "reports");
    if (linkage) {
        write_file(outdir / "reports" / "linkage.json",
                   analysis::linkage_to_json(linkage.value()) + "\n");
        write_file(outdir / "reports" / "linkage.csv", analysis::linkage_to_csv({linkage.value()}));
    }

    dlt::AuditReport ledger_audit = dlt::audit_entries(imported->meta, imported->entries);
    auto equivocation = analysis::equivocation_audit(imported->meta, imported->entries, proofs);
    Json audit;
    audit["ledger"] = ledger_audit.to_string();
    audit["equivocation"] = Json::parse(analysis::audit_to_json(equivocation));
    write_file(outdir / "reports" / "audit.json", audit.dump(2) + "\n");

    analysis::GrowthReport growth;
    growth.mode = meta.value("mode_label", "");
    growth.points.push_back(
        {meta.value("transaction_count", uint64_t{0}), imported->entries.size()});
    write_file(outdir / "reports" / "growth.csv", analysis::growth_to_csv({growth}));
    return {0, ""};
}

} // namespace tokenlab::scenario
