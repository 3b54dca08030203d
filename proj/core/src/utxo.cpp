#include "tokenlab/utxo.hpp"

#include <algorithm>

namespace tokenlab::utxo {

Bytes UtxoLedger::witness_message(const Digest& tx_id, uint32_t input_index) {
    ByteWriter w;
    w.var("tokenlab/utxo-witness/v1").raw(tx_id).u32(input_index);
    return w.take();
}

Bytes UtxoLedger::authority_message(const Digest& tx_id) {
    ByteWriter w;
    w.var("tokenlab/utxo-authority/v1").raw(tx_id);
    return w.take();
}

UtxoLedger::UtxoLedger(dlt::Network& network, crypto::KeyPair authority)
    : network_(network), authority_(std::move(authority)) {}

UtxoLedger::UtxoLedger(dlt::Network& network, DetRng& rng)
    : UtxoLedger(network, crypto::generate_keypair(rng)) {}

Result<Digest> UtxoLedger::mint(ByteSpan owner, const std::vector<uint64_t>& values) {
    if (values.empty()) return Result<Digest>::rejected(Rejection::INVALID);
    UtxoPayload tx;
    tx.subtype = UtxoSubtype::MINT;
    for (uint64_t v : values) {
        if (v == 0) return Result<Digest>::rejected(Rejection::INVALID);
        tx.outputs.push_back({v, Bytes(owner.begin(), owner.end())});
    }
    const Digest tx_id = tx.tx_id();
    Bytes msg = authority_message(tx_id);
    tx.authority_signature =
        crypto::sign(ByteSpan(authority_.secret_key.data(), authority_.secret_key.size()),
                     ByteSpan(msg.data(), msg.size()));
    return submit_mint(tx);
}

Result<Digest> UtxoLedger::submit_mint(const UtxoPayload& tx) {
    if (tx.subtype != UtxoSubtype::MINT || !tx.inputs.empty() || tx.outputs.empty()) {
        return Result<Digest>::rejected(Rejection::INVALID);
    }
    for (const auto& out : tx.outputs) {
        if (out.value == 0) return Result<Digest>::rejected(Rejection::INVALID);
    }
    // A byte-identical mint would recreate outpoints that already exist;
    // token identities are never reused, live or spent.
    for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
        UtxoOutPoint minted{tx.tx_id(), i};
        if (live_.count(minted) != 0 || spent_.count(minted) != 0) {
            return Result<Digest>::rejected(Rejection::INVALID);
        }
    }
    Bytes msg = authority_message(tx.tx_id());
    if (!crypto::verify(ByteSpan(authority_.public_key.data(), authority_.public_key.size()),
                        ByteSpan(msg.data(), msg.size()),
                        ByteSpan(tx.authority_signature.data(), tx.authority_signature.size()))) {
        return Result<Digest>::rejected(Rejection::UNAUTHORISED_ISSUE);
    }
    auto submitted = network_.submit(tx);
    if (!submitted) return Result<Digest>::rejected(submitted.rejection());
    apply(tx);
    return Result<Digest>::ok(tx.tx_id());
}

UtxoPayload UtxoLedger::make_spend(const std::vector<UtxoOutPoint>& inputs,
                                   const std::vector<UtxoOutput>& outputs,
                                   const std::vector<crypto::KeyPair>& signers) {
    UtxoPayload tx;
    tx.subtype = UtxoSubtype::SPEND;
    tx.inputs = inputs;
    tx.outputs = outputs;
    const Digest tx_id = tx.tx_id();
    for (uint32_t i = 0; i < signers.size(); ++i) {
        Bytes msg = witness_message(tx_id, i);
        tx.witnesses.push_back(
            crypto::sign(ByteSpan(signers[i].secret_key.data(), signers[i].secret_key.size()),
                         ByteSpan(msg.data(), msg.size())));
    }
    return tx;
}

Result<Digest> UtxoLedger::submit_spend(const UtxoPayload& tx) {
    if (tx.subtype != UtxoSubtype::SPEND || tx.inputs.empty() || tx.outputs.empty() ||
        tx.witnesses.size() != tx.inputs.size()) {
        return Result<Digest>::rejected(Rejection::INVALID);
    }
    for (const auto& out : tx.outputs) {
        if (out.value == 0) return Result<Digest>::rejected(Rejection::INVALID);
    }

    // Double-spend exclusion comes first: an input that was ever retired, or
    // is named twice in the same transaction, is refused outright.
    std::set<UtxoOutPoint> in_this_tx;
    for (const auto& in : tx.inputs) {
        if (spent_.count(in) || !in_this_tx.insert(in).second) {
            return Result<Digest>::rejected(Rejection::DOUBLE_SPEND);
        }
        if (!live_.count(in)) return Result<Digest>::rejected(Rejection::UNKNOWN_TOKEN);
    }

    uint64_t in_sum = 0;
    uint64_t out_sum = 0;
    for (const auto& in : tx.inputs) in_sum += live_.at(in).value;
    for (const auto& out : tx.outputs) out_sum += out.value;
    if (in_sum != out_sum) return Result<Digest>::rejected(Rejection::VALUE_MISMATCH);

    const Digest tx_id = tx.tx_id();
    for (uint32_t i = 0; i < tx.inputs.size(); ++i) {
        const Bytes& owner = live_.at(tx.inputs[i]).owner;
        Bytes msg = witness_message(tx_id, i);
        if (!crypto::verify(ByteSpan(owner.data(), owner.size()),
                            ByteSpan(msg.data(), msg.size()),
                            ByteSpan(tx.witnesses[i].data(), tx.witnesses[i].size()))) {
            return Result<Digest>::rejected(Rejection::BAD_SIGNATURE);
        }
    }

    auto submitted = network_.submit(tx);
    if (!submitted) return Result<Digest>::rejected(submitted.rejection());
    apply(tx);
    return Result<Digest>::ok(tx_id);
}

Result<Digest> UtxoLedger::transfer(const crypto::KeyPair& sender, ByteSpan recipient,
                                    uint64_t amount) {
    if (amount == 0) return Result<Digest>::rejected(Rejection::INVALID);
    const Bytes sender_key(sender.public_key.begin(), sender.public_key.end());

    std::vector<UtxoOutPoint> inputs;
    uint64_t gathered = 0;
    for (const auto& [outpoint, output] : live_) {
        if (output.owner != sender_key) continue;
        inputs.push_back(outpoint);
        gathered += output.value;
        if (gathered >= amount) break;
    }
    if (gathered < amount) return Result<Digest>::rejected(Rejection::INSUFFICIENT_FUNDS);

    std::vector<UtxoOutput> outputs;
    outputs.push_back({amount, Bytes(recipient.begin(), recipient.end())});
    if (gathered > amount) outputs.push_back({gathered - amount, sender_key});

    std::vector<crypto::KeyPair> signers(inputs.size(), sender);
    return submit_spend(make_spend(inputs, outputs, signers));
}

Result<std::vector<Digest>> UtxoLedger::trace(const UtxoOutPoint& outpoint) const {
    if (!live_.count(outpoint) && !spent_.count(outpoint)) {
        return Result<std::vector<Digest>>::rejected(Rejection::UNKNOWN_TOKEN);
    }
    std::vector<Digest> ancestry;
    std::set<Digest> visited;
    // Post-order walk over creating transactions: ancestors land before
    // descendants, the creating transaction last.
    auto visit = [&](auto&& self, const Digest& tx_id) -> void {
        if (!visited.insert(tx_id).second) return;
        auto it = transactions_.find(tx_id);
        if (it == transactions_.end()) return;
        for (const auto& in : it->second.inputs) self(self, in.tx_id);
        ancestry.push_back(tx_id);
    };
    visit(visit, outpoint.tx_id);
    return Result<std::vector<Digest>>::ok(std::move(ancestry));
}

uint64_t UtxoLedger::balance_of(ByteSpan owner) const {
    uint64_t sum = 0;
    for (const auto& [outpoint, output] : live_) {
        if (output.owner.size() == owner.size() &&
            std::equal(owner.begin(), owner.end(), output.owner.begin())) {
            sum += output.value;
        }
    }
    return sum;
}

const UtxoPayload* UtxoLedger::transaction(const Digest& tx_id) const {
    auto it = transactions_.find(tx_id);
    return it == transactions_.end() ? nullptr : &it->second;
}

void UtxoLedger::apply(const UtxoPayload& tx) {
    const Digest tx_id = tx.tx_id();
    for (const auto& in : tx.inputs) {
        live_.erase(in);
        spent_.insert(in);
    }
    for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
        live_[{tx_id, i}] = tx.outputs[i];
    }
    transactions_[tx_id] = tx;
}

UtxoSnapshot UtxoLedger::snapshot() const {
    return {live_, spent_, {}};
}

UtxoSnapshot UtxoLedger::replay(const std::vector<LedgerEntry>& entries) {
    UtxoSnapshot snap;
    for (const auto& entry : entries) {
        if (entry.kind != dlt::EntryKind::UTXO_TRANSACTION) continue;
        const auto& tx = std::get<UtxoPayload>(entry.payload);
        switch (tx.subtype) {
            case UtxoSubtype::MINT:
            case UtxoSubtype::SPEND: {
                const Digest tx_id = tx.tx_id();
                for (const auto& in : tx.inputs) {
                    snap.live.erase(in);
                    snap.spent.insert(in);
                }
                for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
                    snap.live[{tx_id, i}] = tx.outputs[i];
                }
                break;
            }
            case UtxoSubtype::PRIVATE_ISSUE:
                break;
            case UtxoSubtype::PRIVATE_SPEND:
                snap.spent_serials.insert(tx.serial);
                break;
        }
    }
    return snap;
}

// ---------------------------------------------------------------------------
// Blind issuance

Bytes note_message(uint64_t denomination, const Digest& serial) {
    ByteWriter w;
    w.var("tokenlab/note/v1").u64(denomination).raw(serial);
    return w.take();
}

PrivateIssuer::PrivateIssuer(dlt::Network& network, DetRng& rng,
                             std::vector<uint64_t> denominations, int modulus_bits)
    : network_(network), denominations_(std::move(denominations)) {
    signers_.reserve(denominations_.size());
    for (size_t i = 0; i < denominations_.size(); ++i) {
        signers_.push_back(crypto::BlindSigner::generate(rng, modulus_bits));
    }
}

const crypto::BlindSigner* PrivateIssuer::signer_for(uint64_t denomination) const {
    for (size_t i = 0; i < denominations_.size(); ++i) {
        if (denominations_[i] == denomination) return &signers_[i];
    }
    return nullptr;
}

Result<Bytes> PrivateIssuer::issuer_public(uint64_t denomination) const {
    const auto* signer = signer_for(denomination);
    if (!signer) return Result<Bytes>::rejected(Rejection::BAD_DENOMINATION);
    return Result<Bytes>::ok(signer->public_key());
}

Result<Bytes> PrivateIssuer::issue(uint64_t denomination, const Bytes& blinded_message) {
    const auto* signer = signer_for(denomination);
    if (!signer) return Result<Bytes>::rejected(Rejection::BAD_DENOMINATION);

    auto signed_blob = signer->blind_sign(ByteSpan(blinded_message.data(), blinded_message.size()));
    if (!signed_blob) return Result<Bytes>::rejected(signed_blob.rejection());

    UtxoPayload record;
    record.subtype = UtxoSubtype::PRIVATE_ISSUE;
    record.denomination = denomination;
    record.count = 1;
    auto entry = network_.submit(record);
    if (!entry) return Result<Bytes>::rejected(entry.rejection());

    issues_.push_back({entry.value().index, denomination, blinded_message});
    return signed_blob;
}

Result<uint64_t> PrivateIssuer::redeem(const Note& note) {
    const auto* signer = signer_for(note.denomination);
    if (!signer) return Result<uint64_t>::rejected(Rejection::BAD_DENOMINATION);
    if (!verify_note(note)) return Result<uint64_t>::rejected(Rejection::BAD_SIGNATURE);
    if (spent_serials_.count(note.serial)) {
        return Result<uint64_t>::rejected(Rejection::DOUBLE_SPEND);
    }

    UtxoPayload record;
    record.subtype = UtxoSubtype::PRIVATE_SPEND;
    record.denomination = note.denomination;
    record.serial = note.serial;
    auto entry = network_.submit(record);
    if (!entry) return Result<uint64_t>::rejected(entry.rejection());

    spent_serials_.insert(note.serial);
    spends_.push_back({entry.value().index, note.denomination, note.serial});
    return Result<uint64_t>::ok(note.denomination);
}

bool PrivateIssuer::verify_note(const Note& note) const {
    const auto* signer = signer_for(note.denomination);
    if (!signer) return false;
    Bytes msg = note_message(note.denomination, note.serial);
    return crypto::blind_verify(ByteSpan(signer->public_key().data(), signer->public_key().size()),
                                ByteSpan(msg.data(), msg.size()),
                                ByteSpan(note.signature.data(), note.signature.size()));
}

Result<std::vector<Digest>> PrivateIssuer::trace_note(const Note&) const {
    // Bearer notes carry no ancestry: the ledger holds only blinded
    // issuances and redeemed serials, and nothing joins the two.
    return Result<std::vector<Digest>>::rejected(Rejection::NOT_TRACEABLE);
}

Result<PendingNote> request_note(uint64_t denomination, const Bytes& issuer_public, DetRng& rng) {
    if (denomination == 0 || issuer_public.empty()) {
        return Result<PendingNote>::rejected(Rejection::INVALID);
    }
    PendingNote pending;
    pending.denomination = denomination;
    pending.serial = rng.digest();
    Bytes msg = note_message(denomination, pending.serial);
    pending.blinding = crypto::blind(ByteSpan(msg.data(), msg.size()),
                                     ByteSpan(issuer_public.data(), issuer_public.size()), rng);
    return Result<PendingNote>::ok(std::move(pending));
}

Result<Note> finish_note(const PendingNote& pending, const Bytes& blind_signature,
                         const Bytes& issuer_public) {
    Note note;
    note.denomination = pending.denomination;
    note.serial = pending.serial;
    note.signature = crypto::unblind(
        ByteSpan(blind_signature.data(), blind_signature.size()),
        ByteSpan(pending.blinding.unblinding.data(), pending.blinding.unblinding.size()),
        ByteSpan(issuer_public.data(), issuer_public.size()));
    Bytes msg = note_message(note.denomination, note.serial);
    if (!crypto::blind_verify(ByteSpan(issuer_public.data(), issuer_public.size()),
                              ByteSpan(msg.data(), msg.size()),
                              ByteSpan(note.signature.data(), note.signature.size()))) {
        return Result<Note>::rejected(Rejection::BAD_SIGNATURE);
    }
    return Result<Note>::ok(std::move(note));
}

} // namespace tokenlab::utxo
