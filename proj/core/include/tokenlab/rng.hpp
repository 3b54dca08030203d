#pragma once

#include <cstdint>
#include <random>

#include "tokenlab/bytes.hpp"

namespace tokenlab {

/// Seedable deterministic randomness source. Every piece of randomness in a
/// scenario (key material, serials, blinding factors) is drawn from one of
/// these, injected by the caller, so a (scenario, seed) pair fully determines
/// every output byte.
class DetRng {
public:
    explicit DetRng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, bound). bound must be > 0.
    uint64_t below(uint64_t bound) {
        // rejection sampling keeps the distribution exact
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    void fill(uint8_t* out, size_t n) {
        size_t i = 0;
        while (i < n) {
            uint64_t v = engine_();
            for (int k = 0; k < 8 && i < n; ++k, ++i) {
                out[i] = static_cast<uint8_t>(v >> (8 * k));
            }
        }
    }

    Bytes bytes(size_t n) {
        Bytes out(n);
        fill(out.data(), n);
        return out;
    }

    Digest digest() {
        Digest d;
        fill(d.bytes.data(), d.bytes.size());
        return d;
    }

    /// Derive an independent sub-generator. Used to give each scenario
    /// component its own stream without coupling their draw order.
    DetRng fork() { return DetRng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 engine_;
};

} // namespace tokenlab
