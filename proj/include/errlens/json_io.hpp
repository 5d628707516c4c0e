#pragma once

// nlohmann::json conversions for the structured documents (session files,
// reports, API payloads).

#include "errlens/matcher.hpp"
#include "errlens/session/timing.hpp"

#include <json.hpp>

namespace errlens {

nlohmann::json to_json(const SourceSpan& s);
SourceSpan span_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Fact& f);
Fact fact_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Question& q);
Question question_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Site& s);
Site site_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<Site>& sites);

nlohmann::json to_json(const session::DefectRecord& d);
session::DefectRecord defect_from_json(const nlohmann::json& j);

nlohmann::json to_json(const session::TimingMetrics& m);
session::TimingMetrics timing_from_json(const nlohmann::json& j);

} // namespace errlens
