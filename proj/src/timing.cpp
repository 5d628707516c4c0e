#include "errlens/session/timing.hpp"

namespace errlens::session {

TimingMetrics compute_timing_metrics(const std::vector<DefectRecord>& records)
{
    TimingMetrics m;
    double other_sum = 0.0;
    for (const auto& r : records)
    {
        if (r.targeted)
        {
            m.targeted.push_back({ r.id, r.minutes_from_start });
            ++m.targeted_count;
        }
        else
        {
            other_sum += r.minutes_from_start;
            ++m.other_count;
        }
    }
    if (m.other_count > 0)
        m.mean_other_minutes = other_sum / static_cast<double>(m.other_count);
    return m;
}

} // namespace errlens::session
