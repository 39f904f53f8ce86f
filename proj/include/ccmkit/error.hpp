#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccmkit {

enum class ErrorCode {
    invalid_argument,
    length_mismatch,
    insufficient_data,
    singular,
    io,
    parse,
    unknown_column,
    infeasible_config,
    schema,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a stable code so the CLI can
// print machine-parseable diagnostics.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace ccmkit
