// io.hpp: result envelopes and their CSV / JSON serialization.
//
// CSV layout: `# key=value` metadata lines (value is compact JSON), one
// header row, then data rows. Floats use the shortest decimal form that
// round-trips. LF line endings.

#pragma once

#include "sqzsync/limit_cycle.hpp"
#include "sqzsync/metrics.hpp"
#include "sqzsync/sweep.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sqzsync {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;
using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ResultEnvelope {
    json meta = json::object();
    Table data;
};

std::string format_double(double v);

std::string to_csv(const ResultEnvelope& env);
std::string to_json(const ResultEnvelope& env);

// Inverse of to_csv. Every numeric cell comes back as double.
ResultEnvelope parse_csv(std::string_view text);

// Writes the serialized envelope; throws Error(Io) with the path on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

// Reservoir quantities embedded in every envelope.
json derived_meta(const SystemParams& p);
json params_meta(const SystemParams& p);

// Long-format (x, y, value) table with axis names as column headers.
Table grid_table(const SweepGrid& g);
// path_id, t, theta, phi, x, y
Table trajectory_table(const EnsembleRun& run);
// theta, phi, q
Table q_table(const PhaseGrid& g);

} // namespace sqzsync
