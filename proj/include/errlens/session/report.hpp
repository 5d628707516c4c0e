#pragma once

#include "errlens/matcher.hpp"
#include "errlens/session/timing.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace errlens::session {

/// One inspector action, in the order it was applied.
struct TranscriptEntry
{
    int seq = 0;
    std::string kind; // answer | dismiss | restore
    std::string subject; // question id or site id
    std::string text; // question text for answers
    std::string value; // answer value for answers
    bool overwrite = false;
    double minutes_from_start = 0.0;

    bool operator==(const TranscriptEntry&) const = default;
};

struct InputRef
{
    std::string role; // program | task | catalog | facts
    std::string path;
    std::string sha256;

    bool operator==(const InputRef&) const = default;
};

struct RankedSite
{
    int rank = 0;
    std::string mode_id;
    std::string mode_name;
    Site site;

    bool operator==(const RankedSite&) const = default;
};

struct Report
{
    std::string catalog_name;
    std::string catalog_version;
    std::vector<InputRef> inputs;
    std::optional<std::string> session_id;
    std::optional<std::string> started_at;
    std::vector<RankedSite> sites;
    std::vector<TranscriptEntry> transcript;
    std::vector<DefectRecord> defects;
    TimingMetrics timing;

    bool operator==(const Report&) const = default;
};

enum class ReportFormat
{
    Text,
    Structured,
};

std::optional<ReportFormat> report_format_from_string(std::string_view s);

Report build_report(const eps::Catalog& catalog, std::vector<InputRef> inputs, const std::vector<Site>& ranked,
    std::vector<TranscriptEntry> transcript, std::vector<DefectRecord> defects);

nlohmann::json to_json(const TranscriptEntry& t);
TranscriptEntry transcript_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InputRef& r);
InputRef input_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

std::string render_text(const Report& r);
std::string render_structured(const Report& r);
std::string render(const Report& r, ReportFormat f);

} // namespace errlens::session
