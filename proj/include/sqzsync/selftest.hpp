// selftest.hpp: randomized invariant checks over every module, used by the
// `selftest` subcommand.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqzsync {

struct CheckResult {
    std::string module;
    std::string name;
    bool passed = true;
    std::string detail;
    // Informational finding (does not affect the exit status).
    bool finding = false;
};

std::vector<CheckResult> run_selftest(std::uint64_t seed = 20240917);

} // namespace sqzsync
