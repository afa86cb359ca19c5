#pragma once

#include <string>

#include <json.hpp>

#include "paraverify/pipeline.hpp"

namespace paraverify {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Json, Text };

nlohmann::json reportToJson(const VerificationReport& r);
nlohmann::json invariantToJson(const ProtocolSpec& spec, const ParamInvariant& inv);

// JSON is pretty-printed with sorted keys; text is a human summary.
std::string emitReport(const VerificationReport& r, ReportFormat format);

// The JSON report without its "timings" object.
nlohmann::json withoutTimings(nlohmann::json j);

}  // namespace paraverify
