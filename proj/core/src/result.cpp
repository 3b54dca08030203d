#include "tokenlab/result.hpp"

namespace tokenlab {

std::string_view to_string(Rejection r) {
    switch (r) {
        case Rejection::NO_QUORUM: return "REJECTED_NO_QUORUM";
        case Rejection::INVALID: return "REJECTED_INVALID";
        case Rejection::UNKNOWN_PARTY: return "REJECTED_UNKNOWN_PARTY";
        case Rejection::INSUFFICIENT_FUNDS: return "REJECTED_INSUFFICIENT_FUNDS";
        case Rejection::UNAUTHORISED_ISSUE: return "REJECTED_UNAUTHORISED_ISSUE";
        case Rejection::DOUBLE_SPEND: return "REJECTED_DOUBLE_SPEND";
        case Rejection::UNKNOWN_TOKEN: return "REJECTED_UNKNOWN_TOKEN";
        case Rejection::VALUE_MISMATCH: return "REJECTED_VALUE_MISMATCH";
        case Rejection::BAD_SIGNATURE: return "REJECTED_BAD_SIGNATURE";
        case Rejection::BAD_DENOMINATION: return "REJECTED_BAD_DENOMINATION";
        case Rejection::DUPLICATE_IN_EPOCH: return "REJECTED_DUPLICATE_IN_EPOCH";
        case Rejection::EPOCH_OPEN: return "REJECTED_EPOCH_OPEN";
        case Rejection::DUPLICATE_EPOCH: return "REJECTED_DUPLICATE_EPOCH";
        case Rejection::NOT_TRACEABLE: return "NOT_TRACEABLE";
    }
    return "REJECTED_INVALID";
}

std::optional<Rejection> rejection_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(Rejection::NOT_TRACEABLE); ++i) {
        auto r = static_cast<Rejection>(i);
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

} // namespace tokenlab
