#pragma once

#include <optional>
#include <string>
#include <vector>

namespace errlens::session {

struct DefectRecord
{
    std::string id;
    std::string description;
    double minutes_from_start = 0.0;
    std::optional<std::string> linked_site;
    /// True iff linked to a site that is currently flagged.
    bool targeted = false;

    bool operator==(const DefectRecord&) const = default;
};

struct TargetedTime
{
    std::string defect_id;
    double minutes = 0.0;

    bool operator==(const TargetedTime&) const = default;
};

struct TimingMetrics
{
    std::vector<TargetedTime> targeted;
    /// Arithmetic mean over non-targeted defects; absent when there are none.
    std::optional<double> mean_other_minutes;
    std::size_t targeted_count = 0;
    std::size_t other_count = 0;

    bool operator==(const TimingMetrics&) const = default;
};

TimingMetrics compute_timing_metrics(const std::vector<DefectRecord>& records);

} // namespace errlens::session
