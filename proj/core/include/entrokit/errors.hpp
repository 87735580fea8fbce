#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entrokit {

/// Every failure the library reports carries one of these kinds. The CLI maps
/// kinds onto exit codes, so adding a kind means revisiting that mapping.
enum class ErrorKind {
    Validation,
    NonErgodic,
    BadContext,
    TailCapExceeded,
    TooShort,
    Infeasible,
    IndexOutOfRange,
    Corrupt,
    GuardExceeded,
    ZeroProbabilityBlock,
    NoDecay,
    TooLarge,
    BadDelta,
    WindowTooShort,
    NotStable,
    BelowThreshold,
    Empty,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace entrokit
