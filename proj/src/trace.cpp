#include "jdnewton/trace.hpp"

namespace jdn {

using nlohmann::json;

TraceFile make_trace(const SolveTrace& trace, json config, json summary) {
  TraceFile t;
  t.config = std::move(config);
  t.records = trace.records;
  t.termination = to_string(trace.termination);
  t.summary = summary.is_null() ? json::object() : std::move(summary);
  t.summary["iterations"] = trace.iterations();
  return t;
}

json to_json(const TraceFile& t) {
  json records = json::array();
  for (const auto& r : t.records) {
    records.push_back({{"k", r.k},
                       {"f", r.f},
                       {"grad_norm", r.grad_norm},
                       {"step_norm", r.step_norm},
                       {"orth_defect", r.orth_defect}});
  }
  json j = {{"schema", kTraceSchema},
            {"schema_version", kTraceSchemaVersion},
            {"config", t.config},
            {"records", std::move(records)},
            {"termination", t.termination},
            {"summary", t.summary}};
  if (t.wall_time_s) j["wall_time_s"] = *t.wall_time_s;
  return j;
}

TraceFile trace_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kTraceSchema) {
      throw Error(ErrorCode::ParseError, "trace: unexpected schema name");
    }
    if (j.at("schema_version").get<int>() != kTraceSchemaVersion) {
      throw Error(ErrorCode::ParseError, "trace: unsupported schema version");
    }
    TraceFile t;
    t.config = j.at("config");
    t.termination = j.at("termination").get<std::string>();
    t.summary = j.at("summary");
    for (const auto& r : j.at("records")) {
      t.records.push_back({r.at("k").get<int>(), r.at("f").get<double>(),
                           r.at("grad_norm").get<double>(), r.at("step_norm").get<double>(),
                           r.at("orth_defect").get<double>()});
    }
    if (j.contains("wall_time_s")) t.wall_time_s = j.at("wall_time_s").get<double>();
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("trace: ") + e.what());
  }
}

std::string serialize(const TraceFile& t) { return to_json(t).dump(2) + "\n"; }

TraceFile parse_trace(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("trace: ") + e.what());
  }
  return trace_from_json(j);
}

}  // namespace jdn
