#pragma once

#include "errlens/diagnostic.hpp"
#include "errlens/extractor_registry.hpp"

#include <string>
#include <vector>

namespace errlens::eps {

/// Position of an element in its source document; ignored by equality.
struct SourcePos
{
    int line = 0;
    int column = 0;
};

struct ErrorMode
{
    std::string id;
    std::string name;
    std::string description;
    std::string source;
    SourcePos pos;

    bool operator==(const ErrorMode& o) const
    {
        return id == o.id && name == o.name && description == o.description && source == o.source;
    }
};

enum class AtomKind
{
    Auto,
    Human,
};

struct Param
{
    std::string name;
    Sort sort = Sort::Goal;

    bool operator==(const Param&) const = default;
};

/// A condition the scenario clauses can test. AUTO atoms are decided by a
/// registered extractor; HUMAN atoms are put to the inspector as a question.
struct ConditionAtom
{
    std::string name;
    AtomKind kind = AtomKind::Auto;
    std::vector<Param> params;
    std::string extractor;         // AUTO only
    std::string question_template; // HUMAN only; `{param}` placeholders
    SourcePos pos;

    std::size_t arity() const { return params.size(); }

    bool operator==(const ConditionAtom& o) const
    {
        return name == o.name && kind == o.kind && params == o.params && extractor == o.extractor
            && question_template == o.question_template;
    }
};

/// Boolean expression over atom applications.
struct Clause
{
    enum class Kind
    {
        And,
        Or,
        Not,
        Apply,
    };

    Kind kind = Kind::Apply;
    std::vector<Clause> children;
    std::string atom;              // Apply
    std::vector<std::string> args; // Apply: variable names
    SourcePos pos;

    static Clause apply(std::string atom, std::vector<std::string> args);
    static Clause all_of(std::vector<Clause> cs);
    static Clause any_of(std::vector<Clause> cs);
    static Clause negate(Clause c);

    bool operator==(const Clause& o) const
    {
        return kind == o.kind && children == o.children && atom == o.atom && args == o.args;
    }
};

enum class Tendency
{
    Omission,
    Mismatch,
};

const char* to_string(Tendency t);

struct ThenClause
{
    Tendency tendency = Tendency::Omission;
    std::string target;
    std::string message; // `{var}` placeholders

    bool operator==(const ThenClause&) const = default;
};

enum class Level
{
    Low,
    Medium,
    High,
};

const char* to_string(Level l);

struct ErrorProneScenario
{
    std::string id;
    std::string mode_id;
    Clause if_clause;
    Clause when_clause;
    ThenClause then;
    Level severity = Level::High;
    SourcePos pos;

    bool operator==(const ErrorProneScenario& o) const
    {
        return id == o.id && mode_id == o.mode_id && if_clause == o.if_clause && when_clause == o.when_clause
            && then == o.then && severity == o.severity;
    }
};

struct Catalog
{
    std::string name;
    std::string version;
    std::vector<ErrorMode> modes;
    std::vector<ConditionAtom> atoms;
    std::vector<ErrorProneScenario> scenarios;

    const ErrorMode* find_mode(std::string_view id) const;
    const ConditionAtom* find_atom(std::string_view name) const;
    const ErrorProneScenario* find_scenario(std::string_view id) const;

    bool operator==(const Catalog&) const = default;
};

/// Parses and validates a `.eps` document. Throws InputError with
/// line/column diagnostics on syntax errors or invariant violations.
Catalog parse_catalog(std::string_view text, const ExtractorRegistry& registry = ExtractorRegistry::builtin());

/// Canonical text; re-parses to an equal catalog.
std::string serialize_catalog(const Catalog& c);

/// Empty iff every catalog invariant holds.
std::vector<Diagnostic> validate_catalog(const Catalog& c,
    const ExtractorRegistry& registry = ExtractorRegistry::builtin());

/// Variables of a scenario in first-occurrence order (if, then when), with
/// the sort given by the atoms they are applied to.
std::vector<Param> scenario_variables(const Catalog& c, const ErrorProneScenario& s);

/// Placeholder names appearing as `{name}` in a template.
std::vector<std::string> template_placeholders(std::string_view tmpl);

/// The two-rule catalog shipped with the tool (catalog/core.eps).
std::string_view shipped_catalog_text();

} // namespace errlens::eps
