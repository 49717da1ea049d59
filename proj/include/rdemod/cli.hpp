#pragma once

#include <iosfwd>

namespace rdemod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Entry point for the `rdemod` tool. Configuration is validated before any
/// file is written; every successful command that takes --out also writes
/// manifest.json there.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rdemod::cli
