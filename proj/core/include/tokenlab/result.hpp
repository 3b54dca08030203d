#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <string_view>

namespace tokenlab {

/// Rejection codes shared across the ledger, UTXO and USO engines. These are
/// outcomes of well-formed requests, not programming errors; operations never
/// throw for them.
enum class Rejection {
    NO_QUORUM,
    INVALID,
    UNKNOWN_PARTY,
    INSUFFICIENT_FUNDS,
    UNAUTHORISED_ISSUE,
    DOUBLE_SPEND,
    UNKNOWN_TOKEN,
    VALUE_MISMATCH,
    BAD_SIGNATURE,
    BAD_DENOMINATION,
    DUPLICATE_IN_EPOCH,
    EPOCH_OPEN,
    DUPLICATE_EPOCH,
    NOT_TRACEABLE,
};

std::string_view to_string(Rejection r);
std::optional<Rejection> rejection_from_string(std::string_view s);

/// Value-or-rejection. Smaller than std::expected but carries everything the
/// protocol needs: either a value or a Rejection code.
template <typename T>
class Result {
public:
    static Result ok(T value) {
        Result r;
        r.value_ = std::move(value);
        return r;
    }
    static Result rejected(Rejection code) {
        Result r;
        r.code_ = code;
        return r;
    }

    bool accepted() const { return value_.has_value(); }
    explicit operator bool() const { return accepted(); }

    const T& value() const {
        assert(value_);
        return *value_;
    }
    T& value() {
        assert(value_);
        return *value_;
    }

    Rejection rejection() const {
        assert(!value_);
        return code_;
    }

    /// "accepted" or the rejection name, for event logs.
    std::string outcome() const {
        return accepted() ? "accepted" : std::string(to_string(code_));
    }

private:
    Result() = default;
    std::optional<T> value_;
    Rejection code_ = Rejection::INVALID;
};

} // namespace tokenlab
