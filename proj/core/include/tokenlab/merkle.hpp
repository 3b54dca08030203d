#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tokenlab/bytes.hpp"
#include "tokenlab/crypto.hpp"

namespace tokenlab::merkle {

// One committed (token, record) pair. Trees are ordered lexicographically by
// asset_id, which is what makes bracketing non-inclusion proofs possible.
struct MerkleLeaf {
    Digest asset_id;
    Digest record_digest;

    bool operator==(const MerkleLeaf&) const = default;
};

// Audit path for one leaf, siblings ordered from the leaf level upward. The
// leaf position and tree size are part of the proof: verification binds the
// path to them, so a proof cannot be replayed for a different slot.
struct AuditPath {
    uint64_t leaf_index = 0;
    uint64_t tree_size = 0;
    std::vector<Digest> siblings;

    bool operator==(const AuditPath&) const = default;
};

struct InclusionProof {
    MerkleLeaf leaf;
    AuditPath path;

    bool operator==(const InclusionProof&) const = default;
};

// Absence of an asset_id is shown by exhibiting the committed neighbours that
// would bracket it: adjacent leaves below and above in sort order. At the
// edges (or in an empty tree) the missing side is omitted and the present
// side must sit at the corresponding extreme index.
struct NonInclusionProof {
    uint64_t tree_size = 0;
    std::optional<InclusionProof> lower;
    std::optional<InclusionProof> upper;

    bool operator==(const NonInclusionProof&) const = default;
};

Digest empty_root();
Digest leaf_hash(const MerkleLeaf& leaf);
Digest node_hash(const Digest& left, const Digest& right);

// Recomputes the root implied by an audit path; nullopt if the path shape is
// inconsistent with (leaf_index, tree_size).
std::optional<Digest> root_from_path(const Digest& leaf, const AuditPath& path);

bool verify_inclusion(const Digest& root, const InclusionProof& proof);
bool verify_non_inclusion(const Digest& root, const Digest& asset_id,
                          const NonInclusionProof& proof);

class MerkleTree {
public:
    // Leaves are sorted by asset_id on construction; duplicate asset_ids are
    // a caller bug and throw.
    explicit MerkleTree(std::vector<MerkleLeaf> leaves);

    uint64_t size() const { return leaves_.size(); }
    const std::vector<MerkleLeaf>& leaves() const { return leaves_; }
    Digest root() const;

    std::optional<uint64_t> index_of(const Digest& asset_id) const;
    InclusionProof prove_inclusion(uint64_t index) const;

    // nullopt if the asset_id is in fact committed.
    std::optional<NonInclusionProof> prove_non_inclusion(const Digest& asset_id) const;

private:
    Digest range_root(uint64_t begin, uint64_t end) const;
    void collect_path(uint64_t target, uint64_t begin, uint64_t end,
                      std::vector<Digest>& out) const;

    std::vector<MerkleLeaf> leaves_;
    std::vector<Digest> leaf_hashes_;
};

} // namespace tokenlab::merkle
