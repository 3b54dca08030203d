// Microbenchmarks for the hot paths: hashing, signing, commitment trees,
// proof generation/verification, and end-to-end submission. Run with
// --benchmark_filter=<regex> to narrow.

#include <benchmark/benchmark.h>

#include <vector>

#include "tokenlab/crypto.hpp"
#include "tokenlab/dlt.hpp"
#include "tokenlab/merkle.hpp"
#include "tokenlab/rng.hpp"
#include "tokenlab/uso.hpp"
#include "tokenlab/utxo.hpp"

using namespace tokenlab;

namespace {

ByteSpan span_of(const Bytes& b) { return ByteSpan(b.data(), b.size()); }

void BM_Sha256(benchmark::State& state) {
    DetRng rng(1);
    Bytes data = rng.bytes(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(crypto::hash(span_of(data)));
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(64)->Arg(1024)->Arg(65536);

void BM_Ed25519Sign(benchmark::State& state) {
    DetRng rng(2);
    auto keys = crypto::generate_keypair(rng);
    Bytes msg = rng.bytes(128);
    for (auto _ : state) {
        benchmark::DoNotOptimize(crypto::sign(span_of(keys.secret_key), span_of(msg)));
    }
}
BENCHMARK(BM_Ed25519Sign);

void BM_Ed25519Verify(benchmark::State& state) {
    DetRng rng(3);
    auto keys = crypto::generate_keypair(rng);
    Bytes msg = rng.bytes(128);
    Bytes sig = crypto::sign(span_of(keys.secret_key), span_of(msg));
    for (auto _ : state) {
        benchmark::DoNotOptimize(crypto::verify(span_of(keys.public_key), span_of(msg),
                                                span_of(sig)));
    }
}
BENCHMARK(BM_Ed25519Verify);

std::vector<merkle::MerkleLeaf> make_leaves(size_t n, uint64_t seed) {
    DetRng rng(seed);
    std::vector<merkle::MerkleLeaf> leaves(n);
    for (auto& leaf : leaves) {
        leaf.asset_id = rng.digest();
        leaf.record_digest = rng.digest();
    }
    return leaves;
}

void BM_MerkleBuild(benchmark::State& state) {
    auto leaves = make_leaves(static_cast<size_t>(state.range(0)), 4);
    for (auto _ : state) {
        merkle::MerkleTree tree(leaves);
        benchmark::DoNotOptimize(tree.root());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_MerkleBuild)->Arg(16)->Arg(256)->Arg(4096);

void BM_MerkleProveInclusion(benchmark::State& state) {
    merkle::MerkleTree tree(make_leaves(static_cast<size_t>(state.range(0)), 5));
    uint64_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.prove_inclusion(i++ % tree.leaves().size()));
    }
}
BENCHMARK(BM_MerkleProveInclusion)->Arg(256)->Arg(4096);

void BM_MerkleVerifyInclusion(benchmark::State& state) {
    merkle::MerkleTree tree(make_leaves(static_cast<size_t>(state.range(0)), 6));
    Digest root = tree.root();
    auto proof = tree.prove_inclusion(tree.leaves().size() / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(merkle::verify_inclusion(root, proof));
    }
}
BENCHMARK(BM_MerkleVerifyInclusion)->Arg(256)->Arg(4096);

void BM_UtxoTransfer(benchmark::State& state) {
    DetRng rng(7);
    dlt::Network net(4, rng);
    utxo::UtxoLedger ledger(net, rng);
    auto alice = crypto::generate_keypair(rng);
    auto bob = crypto::generate_keypair(rng);
    (void)ledger.mint(span_of(alice.public_key), {1u << 30});
    bool forward = true;
    for (auto _ : state) {
        auto r = forward ? ledger.transfer(alice, span_of(bob.public_key), 1)
                         : ledger.transfer(bob, span_of(alice.public_key), 1);
        benchmark::DoNotOptimize(r);
        forward = !forward;
    }
    state.SetItemsProcessed(int64_t(state.iterations()));
}
BENCHMARK(BM_UtxoTransfer);

// Proof size and verification cost grow with lifetime; the argument is the
// number of closed epochs the proof must cover.
void bench_uso_world(benchmark::State& state, bool measure_verify) {
    DetRng rng(8);
    dlt::Network net(4, rng);
    uso::UsoIssuer issuer(rng, {}, 512);
    uso::UsoOperator op("bench-op", uso::Mitigation::DLT, &net, rng);
    auto alice = crypto::generate_keypair(rng);
    auto bob = crypto::generate_keypair(rng);

    auto issued = uso::issue_asset(issuer, op, 1, alice.public_key,
                                   uso::IssuePrivacy::TRANSPARENT, rng);
    uso::UsoAsset asset = issued.value();
    (void)op.close_epoch();
    const auto epochs = static_cast<uint64_t>(state.range(0));
    bool forward = true;
    for (uint64_t e = 1; e < epochs; ++e) {
        (void)uso::transfer(asset, forward ? alice : bob,
                            forward ? bob.public_key : alice.public_key, op);
        forward = !forward;
        (void)op.close_epoch();
    }
    (void)uso::refresh_proof(asset, op);

    uso::IssuerTrust trust{issuer.verification_key(), {}};
    if (measure_verify) {
        for (auto _ : state) {
            uso::DltCommitmentSource source(net);
            benchmark::DoNotOptimize(uso::verify_asset(asset, trust, source));
        }
    } else {
        for (auto _ : state) {
            benchmark::DoNotOptimize(op.prove(asset.asset_id(), 0, epochs - 1));
        }
    }
}

void BM_UsoProve(benchmark::State& state) { bench_uso_world(state, false); }
BENCHMARK(BM_UsoProve)->Arg(4)->Arg(16)->Arg(64);

void BM_UsoVerify(benchmark::State& state) { bench_uso_world(state, true); }
BENCHMARK(BM_UsoVerify)->Arg(4)->Arg(16)->Arg(64);

void BM_QuorumSubmit(benchmark::State& state) {
    DetRng rng(9);
    dlt::Network net(static_cast<size_t>(state.range(0)), rng);
    net.register_fiduciary("fa");
    net.register_fiduciary("fb");
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.record_external_evidence("fa", "fb", rng.digest()));
    }
    state.SetItemsProcessed(int64_t(state.iterations()));
}
BENCHMARK(BM_QuorumSubmit)->Arg(4)->Arg(7)->Arg(13);

} // namespace

BENCHMARK_MAIN();
