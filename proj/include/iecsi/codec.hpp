#pragma once

// JSON mapping of the domain types. Shared by the study bundle on disk and
// the HTTP payloads so both speak the same schema.

#include <string>

#include "iecsi/model.hpp"
#include "iecsi/study.hpp"
#include "json.hpp"

namespace iecsi::codec {

using nlohmann::json;

// Pretty-printed, sorted keys, shortest round-trippable reals, trailing LF.
std::string canonical_dump(const json& j);

// Parses text, mapping syntax errors to ParseError(source).
json parse_document(std::string_view text, const std::string& source);

json to_json(const AnalysisConfig& c);
AnalysisConfig config_from_json(const json& j, const std::string& where);

json to_json(const BenchmarkSpec& b);
BenchmarkSpec benchmark_from_json(const json& j, const std::string& where);

// "benchmark" is written as the bundle file reference. On input it may be a
// file reference (resolved by the caller) or an inline benchmark object.
json to_json(const StudyDesign& d);
StudyDesign design_from_json(const json& j, const std::string& where);

json to_json(const Participant& p);
Participant participant_from_json(const json& j, const std::string& where);

json to_json(const ItemResponse& r);
ItemResponse response_from_json(const json& j, const std::string& where);

// Session metadata as stored in sessions.json: responses and ratings live
// in the CSV files and summary text in summaries/.
json session_metadata(const Session& s);

}  // namespace iecsi::codec
