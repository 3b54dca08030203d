#include "tokenlab/merkle.hpp"

#include <algorithm>
#include <stdexcept>

namespace tokenlab::merkle {

namespace {

uint64_t largest_power_of_two_below(uint64_t n) {
    // Largest power of two strictly less than n (n >= 2).
    uint64_t k = 1;
    while (k * 2 < n) k *= 2;
    return k;
}

} // namespace

Digest empty_root() {
    return crypto::hash("tokenlab/merkle-empty/v1");
}

Digest leaf_hash(const MerkleLeaf& leaf) {
    ByteWriter w;
    w.u8(0x00).raw(leaf.asset_id).raw(leaf.record_digest);
    return crypto::hash(w.bytes());
}

Digest node_hash(const Digest& left, const Digest& right) {
    ByteWriter w;
    w.u8(0x01).raw(left).raw(right);
    return crypto::hash(w.bytes());
}

std::optional<Digest> root_from_path(const Digest& leaf, const AuditPath& path) {
    if (path.tree_size == 0 || path.leaf_index >= path.tree_size) return std::nullopt;
    uint64_t fn = path.leaf_index;
    uint64_t sn = path.tree_size - 1;
    Digest r = leaf;
    for (const Digest& sibling : path.siblings) {
        if (sn == 0) return std::nullopt;
        if ((fn & 1) == 1 || fn == sn) {
            r = node_hash(sibling, r);
            if ((fn & 1) == 0) {
                while (fn != 0 && (fn & 1) == 0) {
                    fn >>= 1;
                    sn >>= 1;
                }
            }
        } else {
            r = node_hash(r, sibling);
        }
        fn >>= 1;
        sn >>= 1;
    }
    if (sn != 0) return std::nullopt;
    return r;
}

bool verify_inclusion(const Digest& root, const InclusionProof& proof) {
    auto computed = root_from_path(leaf_hash(proof.leaf), proof.path);
    return computed && *computed == root;
}

bool verify_non_inclusion(const Digest& root, const Digest& asset_id,
                          const NonInclusionProof& proof) {
    if (proof.tree_size == 0) {
        return !proof.lower && !proof.upper && root == empty_root();
    }
    if (proof.lower) {
        const InclusionProof& lo = *proof.lower;
        if (lo.path.tree_size != proof.tree_size) return false;
        if (!(lo.leaf.asset_id < asset_id)) return false;
        if (!verify_inclusion(root, lo)) return false;
    }
    if (proof.upper) {
        const InclusionProof& hi = *proof.upper;
        if (hi.path.tree_size != proof.tree_size) return false;
        if (!(asset_id < hi.leaf.asset_id)) return false;
        if (!verify_inclusion(root, hi)) return false;
    }
    if (proof.lower && proof.upper) {
        // Bracketing neighbours must be adjacent: nothing committed between.
        return proof.lower->path.leaf_index + 1 == proof.upper->path.leaf_index;
    }
    if (proof.upper) return proof.upper->path.leaf_index == 0;
    if (proof.lower) return proof.lower->path.leaf_index == proof.tree_size - 1;
    return false;
}

MerkleTree::MerkleTree(std::vector<MerkleLeaf> leaves) : leaves_(std::move(leaves)) {
    std::sort(leaves_.begin(), leaves_.end(),
              [](const MerkleLeaf& a, const MerkleLeaf& b) { return a.asset_id < b.asset_id; });
    for (size_t i = 1; i < leaves_.size(); ++i) {
        if (leaves_[i - 1].asset_id == leaves_[i].asset_id) {
            throw std::invalid_argument("duplicate asset_id in commitment tree");
        }
    }
    leaf_hashes_.reserve(leaves_.size());
    for (const MerkleLeaf& l : leaves_) leaf_hashes_.push_back(leaf_hash(l));
}

Digest MerkleTree::range_root(uint64_t begin, uint64_t end) const {
    if (end - begin == 1) return leaf_hashes_[begin];
    uint64_t k = largest_power_of_two_below(end - begin);
    return node_hash(range_root(begin, begin + k), range_root(begin + k, end));
}

Digest MerkleTree::root() const {
    if (leaves_.empty()) return empty_root();
    return range_root(0, leaves_.size());
}

std::optional<uint64_t> MerkleTree::index_of(const Digest& asset_id) const {
    auto it = std::lower_bound(
        leaves_.begin(), leaves_.end(), asset_id,
        [](const MerkleLeaf& l, const Digest& id) { return l.asset_id < id; });
    if (it == leaves_.end() || !(it->asset_id == asset_id)) return std::nullopt;
    return static_cast<uint64_t>(it - leaves_.begin());
}

void MerkleTree::collect_path(uint64_t target, uint64_t begin, uint64_t end,
                              std::vector<Digest>& out) const {
    if (end - begin == 1) return;
    uint64_t k = largest_power_of_two_below(end - begin);
    if (target < begin + k) {
        collect_path(target, begin, begin + k, out);
        out.push_back(range_root(begin + k, end));
    } else {
        collect_path(target, begin + k, end, out);
        out.push_back(range_root(begin, begin + k));
    }
}

InclusionProof MerkleTree::prove_inclusion(uint64_t index) const {
    if (index >= leaves_.size()) throw std::out_of_range("leaf index out of range");
    InclusionProof proof;
    proof.leaf = leaves_[index];
    proof.path.leaf_index = index;
    proof.path.tree_size = leaves_.size();
    collect_path(index, 0, leaves_.size(), proof.path.siblings);
    return proof;
}

std::optional<NonInclusionProof> MerkleTree::prove_non_inclusion(const Digest& asset_id) const {
    if (index_of(asset_id)) return std::nullopt;
    NonInclusionProof proof;
    proof.tree_size = leaves_.size();
    if (leaves_.empty()) return proof;

    auto it = std::lower_bound(
        leaves_.begin(), leaves_.end(), asset_id,
        [](const MerkleLeaf& l, const Digest& id) { return l.asset_id < id; });
    uint64_t upper_index = static_cast<uint64_t>(it - leaves_.begin());
    if (upper_index > 0) proof.lower = prove_inclusion(upper_index - 1);
    if (upper_index < leaves_.size()) proof.upper = prove_inclusion(upper_index);
    return proof;
}

} // namespace tokenlab::merkle
