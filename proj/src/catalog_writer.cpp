#include "errlens/eps/catalog.hpp"

#include <sstream>

namespace errlens::eps {

namespace {

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s)
    {
        switch (c)
        {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

// Precedence: or < and < not/apply. Parenthesize a child whose kind binds
// no tighter than its parent so nesting survives a re-parse.
int precedence(Clause::Kind k)
{
    switch (k)
    {
        case Clause::Kind::Or: return 0;
        case Clause::Kind::And: return 1;
        default: return 2;
    }
}

void write_clause(std::ostream& os, const Clause& c)
{
    auto child = [&](const Clause& ch, int parent_prec) {
        const bool parens = ch.kind != Clause::Kind::Apply && ch.kind != Clause::Kind::Not
            && precedence(ch.kind) <= parent_prec;
        if (parens)
            os << '(';
        write_clause(os, ch);
        if (parens)
            os << ')';
    };
    switch (c.kind)
    {
        case Clause::Kind::Apply:
            os << c.atom << '(';
            for (std::size_t i = 0; i < c.args.size(); ++i)
                os << (i ? ", " : "") << c.args[i];
            os << ')';
            break;
        case Clause::Kind::Not:
            os << "not ";
            child(c.children.front(), 1);
            break;
        case Clause::Kind::And:
        case Clause::Kind::Or:
            for (std::size_t i = 0; i < c.children.size(); ++i)
            {
                if (i)
                    os << (c.kind == Clause::Kind::And ? " and " : " or ");
                child(c.children[i], precedence(c.kind));
            }
            break;
    }
}

} // namespace

std::string serialize_catalog(const Catalog& c)
{
    std::ostringstream os;
    os << "catalog " << quote(c.name) << " {\n";
    if (!c.version.empty())
        os << "  version: " << quote(c.version) << ";\n";
    for (const auto& m : c.modes)
    {
        os << "\n  mode " << m.id << " {\n";
        os << "    name: " << quote(m.name) << ";\n";
        os << "    description: " << quote(m.description) << ";\n";
        os << "    source: " << quote(m.source) << ";\n";
        os << "  }\n";
    }
    if (!c.atoms.empty())
    {
        os << "\n  conditions {\n";
        for (const auto& a : c.atoms)
        {
            os << "    " << a.name << '(';
            for (std::size_t i = 0; i < a.params.size(); ++i)
                os << (i ? ", " : "") << a.params[i].name << ": " << minilang::to_string(a.params[i].sort);
            os << "): ";
            if (a.kind == AtomKind::Auto)
                os << "AUTO " << a.extractor;
            else
                os << "HUMAN " << quote(a.question_template);
            os << ";\n";
        }
        os << "  }\n";
    }
    for (const auto& s : c.scenarios)
    {
        os << "\n  eps " << quote(s.id) << " {\n";
        os << "    mode: " << s.mode_id << ";\n";
        os << "    if: ";
        write_clause(os, s.if_clause);
        os << ";\n    when: ";
        write_clause(os, s.when_clause);
        os << ";\n    then: " << to_string(s.then.tendency) << '(' << s.then.target;
        if (!s.then.message.empty())
            os << ", " << quote(s.then.message);
        os << ");\n";
        os << "    severity: " << to_string(s.severity) << ";\n";
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace errlens::eps
