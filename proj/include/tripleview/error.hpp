#pragma once

#include <stdexcept>
#include <string>

namespace tripleview {

enum class ErrorCode {
    InvalidArgument = 1,
    Io,
    Parse,
    Validation,
    BudgetExceeded,
};

/// Single exception type for the core library. The C API maps `code()` onto
/// its status enum, so every failure path throws this (or lets a std
/// exception escape, which maps to an internal error).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace tripleview
