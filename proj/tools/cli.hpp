#pragma once

#include <ostream>

namespace segvec::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kIo = 3;
inline constexpr int kFormat = 4;

// Parses argv and runs one of the vectorize / metrics / diagnose subcommands.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace segvec::cli
