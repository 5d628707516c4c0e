#pragma once

#include "errlens/eps/catalog.hpp"
#include "errlens/extractor_registry.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing_support {

using errlens::ExtractorDef;
using errlens::ExtractorRegistry;
using errlens::Fact;
using errlens::FactSet;
using errlens::Sort;
namespace eps = errlens::eps;

/// A lookup extractor of the test registry: true iff a fact `fact_atom`
/// starts with the bound values.
struct TestLookup
{
    const char* extractor;
    const char* fact_atom;
    std::vector<Sort> params;
    bool mismatch;
};

inline const std::vector<TestLookup>& test_lookups()
{
    using enum Sort;
    static const std::vector<TestLookup> l = {
        { "t_g", "tg", { Goal }, false },
        { "t_gg", "tgg", { Goal, Goal }, false },
        { "t_d", "td", { Data }, false },
        { "t_a", "ta", { Anchor }, false },
        { "t_ga", "tga", { Goal, Anchor }, false },
        { "t_da", "tda", { Data, Anchor }, false },
        { "m_da", "mda", { Data, Anchor }, true },
    };
    return l;
}

inline const char* omission_fact() { return "gap"; }

inline const ExtractorRegistry& test_registry()
{
    static const ExtractorRegistry reg = [] {
        ExtractorRegistry r;
        for (const auto& l : test_lookups())
        {
            ExtractorRegistry tmp;
            tmp.add_lookup(l.extractor, l.fact_atom, l.params, "test");
            ExtractorDef d = *tmp.find(l.extractor);
            d.mismatch = l.mismatch;
            r.add(std::move(d));
        }
        r.add_omission_fact(omission_fact());
        return r;
    }();
    return reg;
}

inline int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

template <class T>
const T& pick_of(std::mt19937& rng, const std::vector<T>& v)
{
    return v[pick(rng, 0, int(v.size()) - 1)];
}

/// Printable text including every escaped character, but no braces.
inline std::string random_text(std::mt19937& rng, int max_len)
{
    static const std::string alphabet = "abcxyz XYZ019 .,;:()#-_'\"\\\n\t";
    std::string s;
    const int n = pick(rng, 0, max_len);
    for (int i = 0; i < n; ++i)
        s += alphabet[pick(rng, 0, int(alphabet.size()) - 1)];
    return s;
}

/// Variable names by sort; disjoint, so random clauses never conflict.
inline const std::vector<std::string>& variables_of(Sort s)
{
    static const std::vector<std::string> goal = { "g", "h" }, data = { "d" }, anchor = { "x", "y" };
    return s == Sort::Goal ? goal : s == Sort::Data ? data : anchor;
}

/// Text with random `{placeholder}`s drawn from `names`.
inline std::string random_template(std::mt19937& rng, const std::vector<std::string>& names, bool allow_empty)
{
    std::string s;
    const int parts = pick(rng, allow_empty ? 0 : 1, 3);
    for (int i = 0; i < parts; ++i)
    {
        s += random_text(rng, 6);
        if (!names.empty() && pick(rng, 0, 1))
            s += "{" + pick_of(rng, names) + "}";
    }
    if (!allow_empty && s.empty())
        s = "?";
    return s;
}

struct CatalogShape
{
    int max_modes = 3;
    int max_atoms = 6;
    int max_scenarios = 4;
    int max_depth = 3;
};

inline eps::Clause random_clause(std::mt19937& rng, const eps::Catalog& c, int depth)
{
    const int kind = depth <= 0 ? 3 : pick(rng, 0, 5);
    if (kind >= 3)
    {
        const auto& atom = pick_of(rng, c.atoms);
        std::vector<std::string> args;
        for (const auto& p : atom.params)
            args.push_back(pick_of(rng, variables_of(p.sort)));
        return eps::Clause::apply(atom.name, args);
    }
    if (kind == 2)
        return eps::Clause::negate(random_clause(rng, c, depth - 1));
    std::vector<eps::Clause> children;
    const int n = pick(rng, 2, 3);
    for (int i = 0; i < n; ++i)
        children.push_back(random_clause(rng, c, depth - 1));
    return kind == 0 ? eps::Clause::all_of(children) : eps::Clause::any_of(children);
}

/// A random catalog that validates against test_registry().
inline eps::Catalog random_catalog(std::mt19937& rng, const CatalogShape& shape = {})
{
    eps::Catalog c;
    c.name = random_text(rng, 8);
    c.version = pick(rng, 0, 1) ? random_text(rng, 4) : "";
    const int modes = pick(rng, 1, shape.max_modes);
    for (int i = 0; i < modes; ++i)
        c.modes.push_back({ "m" + std::to_string(i + 1), random_text(rng, 10), random_text(rng, 20),
            random_text(rng, 10), {} });

    const int atoms = pick(rng, 1, shape.max_atoms);
    for (int i = 0; i < atoms; ++i)
    {
        eps::ConditionAtom a;
        if (pick(rng, 0, 2))
        {
            const auto& l = pick_of(rng, test_lookups());
            a.name = "c" + std::to_string(i + 1);
            a.kind = eps::AtomKind::Auto;
            a.extractor = l.extractor;
            const char* names[] = { "p", "q" };
            for (std::size_t k = 0; k < l.params.size(); ++k)
                a.params.push_back({ names[k], l.params[k] });
        }
        else
        {
            a.name = "q" + std::to_string(i + 1);
            a.kind = eps::AtomKind::Human;
            const int arity = pick(rng, 1, 2);
            std::vector<std::string> names;
            for (int k = 0; k < arity; ++k)
            {
                names.push_back("v" + std::to_string(k));
                a.params.push_back({ names.back(), static_cast<Sort>(pick(rng, 0, 2)) });
            }
            a.question_template = random_template(rng, names, false);
        }
        c.atoms.push_back(std::move(a));
    }

    const int scenarios = pick(rng, 0, shape.max_scenarios);
    for (int i = 0; i < scenarios; ++i)
    {
        eps::ErrorProneScenario s;
        s.id = "s" + std::to_string(i + 1) + (pick(rng, 0, 1) ? "_x" : "");
        s.mode_id = pick_of(rng, c.modes).id;
        s.if_clause = random_clause(rng, c, pick(rng, 0, shape.max_depth));
        s.when_clause = random_clause(rng, c, pick(rng, 0, shape.max_depth));
        std::vector<std::string> vars;
        for (const auto& v : eps::scenario_variables(c, s))
            vars.push_back(v.name);
        s.then.tendency = pick(rng, 0, 1) ? eps::Tendency::Mismatch : eps::Tendency::Omission;
        s.then.target = pick_of(rng, vars);
        s.then.message = random_template(rng, vars, true);
        s.severity = static_cast<eps::Level>(pick(rng, 0, 2));
        c.scenarios.push_back(std::move(s));
    }
    return c;
}

/// Values used by random facts, by sort.
inline const std::vector<std::string>& values_of(Sort s)
{
    static const std::vector<std::string> goal = { "G1", "G2", "G3" }, data = { "D1", "D2" },
                                          anchor = { "f@1:1", "f@2:1" };
    return s == Sort::Goal ? goal : s == Sort::Data ? data : anchor;
}

/// Up to `max_facts` facts over the test registry's fact atoms.
inline FactSet random_facts(std::mt19937& rng, int max_facts)
{
    FactSet fs;
    const int n = pick(rng, 0, max_facts);
    for (int i = 0; i < n; ++i)
    {
        Fact f;
        if (pick(rng, 0, 5) == 0)
        {
            f.atom = omission_fact();
            const Sort s = static_cast<Sort>(pick(rng, 0, 2));
            f.args.push_back({ s, pick_of(rng, values_of(s)) });
        }
        else
        {
            const auto& l = pick_of(rng, test_lookups());
            f.atom = l.fact_atom;
            for (Sort s : l.params)
                f.args.push_back({ s, pick_of(rng, values_of(s)) });
        }
        f.provenance = "test";
        fs.facts.push_back(std::move(f));
    }
    return fs;
}

} // namespace testing_support
