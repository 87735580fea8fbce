#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "entrokit/errors.hpp"

namespace entrokit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // selftest found a failing check
inline constexpr int kExitValidation = 2;
inline constexpr int kExitGuard = 3;
inline constexpr int kExitViolation = 4;

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Quick checks over closed-form examples; one PASS/FAIL line each.
int run_selftest(std::ostream& out);

}  // namespace entrokit::cli
