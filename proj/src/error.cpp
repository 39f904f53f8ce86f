#include "ccmkit/error.hpp"

namespace ccmkit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::singular: return "singular";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::unknown_column: return "unknown_column";
    case ErrorCode::infeasible_config: return "infeasible_config";
    case ErrorCode::schema: return "schema";
    }
    return "unknown";
}

} // namespace ccmkit
