#pragma once

#include "errlens/diagnostic.hpp"
#include "errlens/minilang/ast.hpp"
#include "errlens/minilang/task_spec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace errlens::minilang {

/// Sort of a fact argument. Goal, Data and Anchor values can be bound by
/// scenario variables; Value arguments are payload only.
enum class Sort
{
    Goal,
    Data,
    Anchor,
    Value,
};

const char* to_string(Sort s);
std::optional<Sort> sort_from_string(std::string_view s);

struct FactArg
{
    Sort sort = Sort::Value;
    std::string value;

    bool operator==(const FactArg&) const = default;
    auto operator<=>(const FactArg&) const = default;
};

struct Fact
{
    std::string atom;
    std::vector<FactArg> args;
    std::vector<SourceSpan> evidence;
    std::optional<std::string> task_path;
    std::string provenance;

    /// `atom(v1, v2, ...)`
    std::string render() const;
    const std::string& arg(std::size_t i) const { return args.at(i).value; }

    bool operator==(const Fact&) const = default;
};

/// Fact names the frontends may emit, with their argument sorts.
struct FactSchema
{
    std::string atom;
    std::vector<Sort> sorts;
    std::size_t required = 0; // trailing args past this index are optional
    std::string provider;     // "minilang_frontend" or "model_fitter"
};

const std::vector<FactSchema>& fact_vocabulary();
const FactSchema* find_fact_schema(std::string_view atom);

struct FactSet
{
    std::vector<Fact> facts;

    std::vector<const Fact*> named(std::string_view atom) const;
    bool contains(const Fact& f) const;
    void append(const FactSet& other);

    bool operator==(const FactSet&) const = default;
};

/// `fn@line:col` of a span inside function `fn`.
std::string anchor_id(const std::string& function, const SourceSpan& span);

/// Runs every registered extractor over the program and task.
FactSet extract_facts(const Program& program, const TaskSpec& task);

/// Reads an externally produced fact document. Throws InputError on unknown
/// atoms, sort mismatches and facts without evidence.
FactSet parse_fact_document(std::string_view json_text);
std::string write_fact_document(const FactSet& facts);

} // namespace errlens::minilang
