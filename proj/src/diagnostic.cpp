#include "errlens/diagnostic.hpp"

#include <sstream>

namespace errlens {

std::string to_string(const Diagnostic& d)
{
    std::ostringstream os;
    if (d.line > 0)
        os << d.line << ':' << d.column << ": ";
    os << (d.severity == Severity::Error ? "error" : "warning");
    if (!d.code.empty())
        os << '[' << d.code << ']';
    os << ": " << d.message;
    return os.str();
}

std::string to_string(const std::vector<Diagnostic>& ds)
{
    std::string out;
    for (const auto& d : ds)
    {
        if (!out.empty())
            out += '\n';
        out += to_string(d);
    }
    return out;
}

InputError::InputError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(to_string(diagnostics))
    , m_diagnostics(std::move(diagnostics))
{}

InputError::InputError(std::string code, std::string message, int line, int column)
    : InputError(std::vector<Diagnostic> { Diagnostic { Severity::Error, std::move(code), std::move(message), line, column, {} } })
{}

} // namespace errlens
