#include "tokenlab/bytes.hpp"

#include <unordered_set>

namespace tokenlab {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::string to_hex(ByteSpan data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::optional<Bytes> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string Digest::hex() const {
    return to_hex(span());
}

std::optional<Digest> Digest::from_hex(std::string_view hex) {
    auto raw = tokenlab::from_hex(hex);
    if (!raw || raw->size() != 32) return std::nullopt;
    Digest d;
    std::memcpy(d.bytes.data(), raw->data(), 32);
    return d;
}

ByteWriter& ByteWriter::u8(uint8_t v) {
    buf_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(uint32_t v) {
    buf_.push_back(static_cast<uint8_t>(v >> 24));
    buf_.push_back(static_cast<uint8_t>(v >> 16));
    buf_.push_back(static_cast<uint8_t>(v >> 8));
    buf_.push_back(static_cast<uint8_t>(v));
    return *this;
}

ByteWriter& ByteWriter::u64(uint64_t v) {
    u32(static_cast<uint32_t>(v >> 32));
    u32(static_cast<uint32_t>(v));
    return *this;
}

ByteWriter& ByteWriter::raw(ByteSpan data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
}

ByteWriter& ByteWriter::var(ByteSpan data) {
    u32(static_cast<uint32_t>(data.size()));
    return raw(data);
}

ByteWriter& ByteWriter::var(std::string_view s) {
    return var(ByteSpan(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

bool contains_bytes(ByteSpan haystack, ByteSpan needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    const auto* first = haystack.data();
    const auto* last = haystack.data() + haystack.size() - needle.size() + 1;
    for (const auto* p = first; p != last; ++p) {
        if (std::memcmp(p, needle.data(), needle.size()) == 0) return true;
    }
    return false;
}

bool shares_substring(ByteSpan a, ByteSpan b, size_t window) {
    if (window == 0 || a.size() < window || b.size() < window) return false;
    std::unordered_set<std::string_view> windows;
    windows.reserve(a.size() - window + 1);
    const char* ap = reinterpret_cast<const char*>(a.data());
    for (size_t i = 0; i + window <= a.size(); ++i) {
        windows.insert(std::string_view(ap + i, window));
    }
    const char* bp = reinterpret_cast<const char*>(b.data());
    for (size_t i = 0; i + window <= b.size(); ++i) {
        if (windows.count(std::string_view(bp + i, window))) return true;
    }
    return false;
}

} // namespace tokenlab
