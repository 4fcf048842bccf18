#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reflex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCap = 3;

inline constexpr const char* kVersion = "1.0.0";

// Runs one command line (without the program name). Structured output goes
// to `out`, diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reflex::cli
