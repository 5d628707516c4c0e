#pragma once

#include <cstdint>
#include <string>

namespace errlens::session {

/// Time source for sessions. Elapsed time comes from the steady reading;
/// the wall reading only labels the session start and bridges reboots.
class Clock
{
public:
    virtual ~Clock() = default;
    virtual std::int64_t steady_ns() const = 0;
    virtual std::int64_t wall_ms() const = 0;
};

class SystemClock final : public Clock
{
public:
    std::int64_t steady_ns() const override;
    std::int64_t wall_ms() const override;
};

/// Deterministic clock for tests and scripted replays.
class ManualClock final : public Clock
{
public:
    explicit ManualClock(std::int64_t wall_ms_at_start = 1'600'000'000'000, std::int64_t steady_ns_at_start = 0)
        : m_wall_ms(wall_ms_at_start)
        , m_steady_ns(steady_ns_at_start)
    {}

    std::int64_t steady_ns() const override { return m_steady_ns; }
    std::int64_t wall_ms() const override { return m_wall_ms; }

    void advance_minutes(double minutes);
    /// Sets the clock to `minutes` after its construction time.
    void set_minutes(double minutes);

private:
    std::int64_t m_wall_ms;
    std::int64_t m_steady_ns;
    std::int64_t m_origin_wall_ms = m_wall_ms;
    std::int64_t m_origin_steady_ns = m_steady_ns;
};

/// ISO-8601 UTC with millisecond precision, e.g. 2020-09-13T12:26:40.000Z.
std::string format_utc(std::int64_t wall_ms);

} // namespace errlens::session
