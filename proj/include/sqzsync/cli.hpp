// cli.hpp: the sqzsync command-line front end.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqzsync::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParam = 1;
inline constexpr int kExitNumerical = 2;

// Environment fallback for --workers.
inline constexpr const char* kWorkersEnv = "SQZSYNC_WORKERS";

// args excludes the program name. Result payloads go to `out` when no
// --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sqzsync::cli
