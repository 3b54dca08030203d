#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tokenlab {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

/// 32-byte digest value. Ordered so it can key std::map and be sorted
/// bytewise, which the epoch trees rely on.
struct Digest {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    ByteSpan span() const { return ByteSpan(bytes.data(), bytes.size()); }
    std::string hex() const;
    static std::optional<Digest> from_hex(std::string_view hex);
};

std::string to_hex(ByteSpan data);
std::optional<Bytes> from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

/// Canonical big-endian encoder. Every structure that is hashed, signed or
/// exported gets exactly one encoding, built with this writer in field
/// declaration order.
class ByteWriter {
public:
    ByteWriter& u8(uint8_t v);
    ByteWriter& u32(uint32_t v);
    ByteWriter& u64(uint64_t v);
    ByteWriter& raw(ByteSpan data);                // fixed-length, no prefix
    ByteWriter& raw(const Digest& d) { return raw(d.span()); }
    ByteWriter& var(ByteSpan data);                // u32 length prefix
    ByteWriter& var(std::string_view s);

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

/// True if `a` and `b` share any common substring of `window` bytes.
/// Used by the unlinkability and obliviousness checks.
bool shares_substring(ByteSpan a, ByteSpan b, size_t window);

/// True if `needle` occurs contiguously in `haystack`.
bool contains_bytes(ByteSpan haystack, ByteSpan needle);

} // namespace tokenlab
