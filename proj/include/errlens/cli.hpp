#pragma once

#include "errlens/session/clock.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace errlens::cli {

enum ExitCode
{
    exit_ok = 0,
    exit_flagged = 1,
    exit_error = 2,
};

/// Process surroundings, injectable for tests.
struct Environment
{
    std::istream* in = nullptr;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
    bool interactive = false;
    const session::Clock* clock = nullptr;
    std::function<std::string()> next_id;
    std::function<std::optional<std::string>(const char*)> getenv;

    /// stdin/stdout/stderr, the system clock and the real environment.
    static Environment process();
};

int run(int argc, const char* const* argv, Environment env);

} // namespace errlens::cli
