#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace errlens {

/// Half-open byte range plus 1-based line/column of both ends.
struct SourceSpan
{
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;
    int column = 0;
    int end_line = 0;
    int end_column = 0;

    bool operator==(const SourceSpan&) const = default;
};

enum class Severity
{
    Error,
    Warning,
};

struct Diagnostic
{
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    int line = 0;   // 0 when the element has no source position
    int column = 0;
    std::string element;

    bool operator==(const Diagnostic&) const = default;
};

std::string to_string(const Diagnostic& d);
std::string to_string(const std::vector<Diagnostic>& ds);

/// Thrown by every parser/validator when input is rejected. Carries all
/// diagnostics collected before giving up.
class InputError : public std::runtime_error
{
public:
    explicit InputError(std::vector<Diagnostic> diagnostics);
    InputError(std::string code, std::string message, int line = 0, int column = 0);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return m_diagnostics; }

private:
    std::vector<Diagnostic> m_diagnostics;
};

} // namespace errlens
