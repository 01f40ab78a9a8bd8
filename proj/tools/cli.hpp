#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the pec command line. args excludes the program name.
/// Returns 0 on success, 1 on usage/validation errors, 2 on runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pec::cli
