#pragma once

#include "errlens/minilang/facts.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace errlens {

using minilang::Fact;
using minilang::FactSet;
using minilang::Sort;

struct MatchConfig
{
    /// POWER data counts as super-linear when p >= 1 + margin.
    double superlinearity_margin = 0.2;
};

struct AtomResult
{
    bool value = false;
    /// Facts that made the atom true (empty when false).
    std::vector<Fact> support;
};

/// A named, machine-decidable predicate that AUTO condition atoms bind to.
struct ExtractorDef
{
    std::string name;
    std::vector<Sort> params;
    std::string provider;
    /// True results count as mismatch evidence for `then: mismatch(..)`.
    bool mismatch = false;
    std::function<AtomResult(const FactSet&, std::span<const std::string>, const MatchConfig&)> evaluate;
    /// Values this extractor can produce at parameter `index`, in fact order.
    std::function<std::vector<std::string>(const FactSet&, std::size_t index)> candidates;
};

class ExtractorRegistry
{
public:
    /// Extractors backed by minilang_frontend and model_fitter facts.
    static const ExtractorRegistry& builtin();

    void add(ExtractorDef def);

    /// Predicate true iff a fact named `fact_atom` exists whose leading
    /// arguments equal the bound values (and whose trailing arguments equal
    /// `fixed`, when given).
    void add_lookup(std::string name, std::string fact_atom, std::vector<Sort> params, std::string provider,
        std::vector<std::string> fixed = {});

    /// Facts whose presence is omission evidence when one of their arguments
    /// equals a scenario's target value.
    void add_omission_fact(std::string atom);

    const ExtractorDef* find(std::string_view name) const;
    const std::vector<ExtractorDef>& all() const { return m_defs; }
    bool is_omission_fact(std::string_view atom) const;

private:
    std::vector<ExtractorDef> m_defs;
    std::vector<std::string> m_omission_facts;
};

} // namespace errlens
