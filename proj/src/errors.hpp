#pragma once

#include <stdexcept>
#include <string>

namespace bansa {

enum class ErrorCode {
    invalid_input,
    shape_mismatch,
    degenerate_correlation,
    insufficient_pool,
    bad_config,
    bad_magic,
    bad_version,
    truncated_payload,
    dim_overflow,
    io_failure,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace bansa
