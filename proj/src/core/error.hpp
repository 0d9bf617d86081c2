#pragma once

#include <stdexcept>
#include <string>

namespace pctv {

// Numeric values are part of the C ABI (see pctv.h); do not renumber.
enum class ErrorCode : int {
    Ok = 0,
    InvalidProfile = 1,
    Divergence = 2,
    Parameter = 3,
    Shape = 4,
    Index = 5,
    Envelope = 6,
    Marginal = 7,
    Unsupported = 8,
    Composition = 9,
    Config = 10,
    Io = 11,
    Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const char* what) {
    if (!cond) fail(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace pctv
