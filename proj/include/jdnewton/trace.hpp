#pragma once

// JSON trace documents written by the CLI.

#include "jdnewton/newton.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace jdn {

inline constexpr const char* kTraceSchema = "jdnewton.trace";
inline constexpr int kTraceSchemaVersion = 1;

struct TraceFile {
  nlohmann::json config = nlohmann::json::object();
  std::vector<IterationRecord> records;
  std::string termination;
  nlohmann::json summary = nlohmann::json::object();
  /// Omitted unless timing was requested, so seeded runs are byte-identical.
  std::optional<double> wall_time_s;
};

TraceFile make_trace(const SolveTrace& trace, nlohmann::json config, nlohmann::json summary = {});

nlohmann::json to_json(const TraceFile& t);
/// Throws ParseError on a wrong schema name, version, or missing field.
TraceFile trace_from_json(const nlohmann::json& j);

std::string serialize(const TraceFile& t);
TraceFile parse_trace(const std::string& text);

}  // namespace jdn
