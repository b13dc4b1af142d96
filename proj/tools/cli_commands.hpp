#pragma once

#include <ostream>

namespace smax::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNotMember = 1;
inline constexpr int kUsage = 2;
inline constexpr int kDomain = 3;

// Parses argv and runs one command; output goes to out (or --out), diagnostics to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smax::cli
