#include "errlens/session/clock.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

namespace errlens::session {

std::int64_t SystemClock::steady_ns() const
{
    using namespace std::chrono;
    return duration_cast<nanoseconds>(steady_clock::now().time_since_epoch()).count();
}

std::int64_t SystemClock::wall_ms() const
{
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void ManualClock::advance_minutes(double minutes)
{
    m_steady_ns += static_cast<std::int64_t>(std::llround(minutes * 60e9));
    m_wall_ms += static_cast<std::int64_t>(std::llround(minutes * 60e3));
}

void ManualClock::set_minutes(double minutes)
{
    m_steady_ns = m_origin_steady_ns + static_cast<std::int64_t>(std::llround(minutes * 60e9));
    m_wall_ms = m_origin_wall_ms + static_cast<std::int64_t>(std::llround(minutes * 60e3));
}

std::string format_utc(std::int64_t wall_ms)
{
    std::int64_t secs64 = wall_ms / 1000;
    int ms = static_cast<int>(wall_ms % 1000);
    if (ms < 0)
    {
        ms += 1000;
        --secs64;
    }
    const std::time_t secs = static_cast<std::time_t>(secs64);
    std::tm tm {};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
        tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
    return buf;
}

} // namespace errlens::session
