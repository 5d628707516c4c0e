#include "errlens/eps/catalog.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace errlens::eps {

const char* to_string(Tendency t) { return t == Tendency::Omission ? "omission" : "mismatch"; }

const char* to_string(Level l)
{
    switch (l)
    {
        case Level::Low: return "low";
        case Level::Medium: return "medium";
        case Level::High: return "high";
    }
    return "?";
}

Clause Clause::apply(std::string atom, std::vector<std::string> args)
{
    Clause c;
    c.kind = Kind::Apply;
    c.atom = std::move(atom);
    c.args = std::move(args);
    return c;
}

Clause Clause::all_of(std::vector<Clause> cs)
{
    Clause c;
    c.kind = Kind::And;
    c.children = std::move(cs);
    return c;
}

Clause Clause::any_of(std::vector<Clause> cs)
{
    Clause c;
    c.kind = Kind::Or;
    c.children = std::move(cs);
    return c;
}

Clause Clause::negate(Clause inner)
{
    Clause c;
    c.kind = Kind::Not;
    c.children.push_back(std::move(inner));
    return c;
}

const ErrorMode* Catalog::find_mode(std::string_view id) const
{
    for (const auto& m : modes)
        if (m.id == id)
            return &m;
    return nullptr;
}

const ConditionAtom* Catalog::find_atom(std::string_view n) const
{
    for (const auto& a : atoms)
        if (a.name == n)
            return &a;
    return nullptr;
}

const ErrorProneScenario* Catalog::find_scenario(std::string_view id) const
{
    for (const auto& s : scenarios)
        if (s.id == id)
            return &s;
    return nullptr;
}

std::vector<std::string> template_placeholders(std::string_view tmpl)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = tmpl.find('{', pos)) != std::string_view::npos)
    {
        const auto close = tmpl.find('}', pos);
        if (close == std::string_view::npos)
            break;
        out.emplace_back(tmpl.substr(pos + 1, close - pos - 1));
        pos = close + 1;
    }
    return out;
}

namespace {

bool is_identifier(std::string_view s)
{
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z'))
        return false;
    return std::all_of(s.begin(), s.end(),
        [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

void collect_applications(const Clause& c, std::vector<const Clause*>& out)
{
    if (c.kind == Clause::Kind::Apply)
        out.push_back(&c);
    for (const auto& ch : c.children)
        collect_applications(ch, out);
}

class Validator
{
public:
    Validator(const Catalog& c, const ExtractorRegistry& reg)
        : m_cat(c)
        , m_reg(reg)
    {}

    std::vector<Diagnostic> run()
    {
        modes();
        atoms();
        std::set<std::string> ids;
        for (const auto& s : m_cat.scenarios)
        {
            if (!is_identifier(s.id))
                error("invalid_id", "scenario id '" + s.id + "' must match [a-z][a-z0-9_]*", s.pos, s.id);
            if (!ids.insert(s.id).second)
                error("duplicate_id", "duplicate scenario id '" + s.id + "'", s.pos, s.id);
            scenario(s);
        }
        return std::move(m_diags);
    }

private:
    void error(const char* code, std::string msg, SourcePos pos, std::string element)
    {
        m_diags.push_back({ Severity::Error, code, std::move(msg), pos.line, pos.column, std::move(element) });
    }

    void modes()
    {
        std::set<std::string> ids;
        for (const auto& m : m_cat.modes)
        {
            if (!is_identifier(m.id))
                error("invalid_id", "mode id '" + m.id + "' must match [a-z][a-z0-9_]*", m.pos, m.id);
            if (!ids.insert(m.id).second)
                error("duplicate_id", "duplicate mode id '" + m.id + "'", m.pos, m.id);
        }
    }

    void atoms()
    {
        std::set<std::string> names;
        for (const auto& a : m_cat.atoms)
        {
            if (!is_identifier(a.name))
                error("invalid_id", "condition name '" + a.name + "' must match [a-z][a-z0-9_]*", a.pos, a.name);
            if (!names.insert(a.name).second)
                error("duplicate_id", "duplicate condition '" + a.name + "'", a.pos, a.name);
            std::set<std::string> params;
            for (const auto& p : a.params)
            {
                if (!is_identifier(p.name))
                    error("invalid_id", "parameter '" + p.name + "' of '" + a.name + "' is not an identifier", a.pos,
                        a.name);
                if (!params.insert(p.name).second)
                    error("duplicate_id", "duplicate parameter '" + p.name + "' in '" + a.name + "'", a.pos, a.name);
                if (p.sort == Sort::Value)
                    error("bad_sort", "parameter '" + p.name + "' of '" + a.name + "' must be goal, data or anchor",
                        a.pos, a.name);
            }
            if (a.kind == AtomKind::Auto)
            {
                if (!a.question_template.empty())
                    error("kind_fields", "AUTO condition '" + a.name + "' must not carry a question", a.pos, a.name);
                const ExtractorDef* def = m_reg.find(a.extractor);
                if (!def)
                    error("unresolved_reference", "unknown extractor '" + a.extractor + "' for '" + a.name + "'",
                        a.pos, a.extractor);
                else
                {
                    std::vector<Sort> sorts;
                    for (const auto& p : a.params)
                        sorts.push_back(p.sort);
                    if (sorts != def->params)
                    {
                        std::string sig;
                        for (auto s : def->params)
                            sig += (sig.empty() ? "" : ", ") + std::string(minilang::to_string(s));
                        error("signature", "condition '" + a.name + "' does not match extractor '" + a.extractor
                                + "(" + sig + ")'", a.pos, a.name);
                    }
                }
            }
            else
            {
                if (!a.extractor.empty())
                    error("kind_fields", "HUMAN condition '" + a.name + "' must not name an extractor", a.pos, a.name);
                if (a.question_template.empty())
                    error("empty_question", "HUMAN condition '" + a.name + "' needs a question", a.pos, a.name);
                for (const auto& ph : template_placeholders(a.question_template))
                    if (!params.count(ph))
                        error("bad_placeholder", "question of '" + a.name + "' uses unknown placeholder {" + ph + "}",
                            a.pos, a.name);
            }
        }
    }

    void clause_shape(const Clause& c, const ErrorProneScenario& s)
    {
        switch (c.kind)
        {
            case Clause::Kind::And:
            case Clause::Kind::Or:
                if (c.children.size() < 2)
                    error("malformed_clause", "and/or in '" + s.id + "' needs at least two operands", c.pos, s.id);
                break;
            case Clause::Kind::Not:
                if (c.children.size() != 1)
                    error("malformed_clause", "not in '" + s.id + "' needs exactly one operand", c.pos, s.id);
                break;
            case Clause::Kind::Apply:
                if (!c.children.empty())
                    error("malformed_clause", "atom application cannot have sub-clauses", c.pos, s.id);
                break;
        }
        for (const auto& ch : c.children)
            clause_shape(ch, s);
    }

    void scenario(const ErrorProneScenario& s)
    {
        if (!m_cat.find_mode(s.mode_id))
            error("unresolved_reference", "scenario '" + s.id + "' references unknown mode '" + s.mode_id + "'", s.pos,
                s.mode_id);
        clause_shape(s.if_clause, s);
        clause_shape(s.when_clause, s);

        std::vector<const Clause*> apps;
        collect_applications(s.if_clause, apps);
        collect_applications(s.when_clause, apps);
        std::map<std::string, Sort> sorts;
        for (const auto* app : apps)
        {
            const ConditionAtom* atom = m_cat.find_atom(app->atom);
            if (!atom)
            {
                error("unresolved_reference", "undeclared condition '" + app->atom + "' in '" + s.id + "'", app->pos,
                    app->atom);
                continue;
            }
            if (atom->arity() != app->args.size())
            {
                error("arity", "condition '" + app->atom + "' takes " + std::to_string(atom->arity())
                        + " argument(s), given " + std::to_string(app->args.size()), app->pos, app->atom);
                continue;
            }
            for (std::size_t i = 0; i < app->args.size(); ++i)
            {
                const auto& var = app->args[i];
                if (!is_identifier(var))
                    error("invalid_id", "variable '" + var + "' is not an identifier", app->pos, var);
                auto [it, fresh] = sorts.emplace(var, atom->params[i].sort);
                if (!fresh && it->second != atom->params[i].sort)
                    error("sort_conflict", "variable '" + var + "' used as both " + minilang::to_string(it->second)
                            + " and " + minilang::to_string(atom->params[i].sort) + " in '" + s.id + "'",
                        app->pos, var);
            }
        }
        if (!sorts.count(s.then.target))
            error("unbound_target", "unbound target '" + s.then.target + "' in then clause of '" + s.id + "'", s.pos,
                s.id);
        for (const auto& ph : template_placeholders(s.then.message))
            if (!sorts.count(ph))
                error("bad_placeholder", "message of '" + s.id + "' uses unbound placeholder {" + ph + "}", s.pos,
                    s.id);
    }

    const Catalog& m_cat;
    const ExtractorRegistry& m_reg;
    std::vector<Diagnostic> m_diags;
};

} // namespace

std::vector<Diagnostic> validate_catalog(const Catalog& c, const ExtractorRegistry& registry)
{
    return Validator(c, registry).run();
}

std::vector<Param> scenario_variables(const Catalog& c, const ErrorProneScenario& s)
{
    std::vector<const Clause*> apps;
    collect_applications(s.if_clause, apps);
    collect_applications(s.when_clause, apps);
    std::vector<Param> out;
    for (const auto* app : apps)
    {
        const ConditionAtom* atom = c.find_atom(app->atom);
        for (std::size_t i = 0; i < app->args.size(); ++i)
        {
            if (std::any_of(out.begin(), out.end(), [&](const Param& p) { return p.name == app->args[i]; }))
                continue;
            out.push_back({ app->args[i], atom && i < atom->params.size() ? atom->params[i].sort : Sort::Value });
        }
    }
    return out;
}

} // namespace errlens::eps
