#include "errlens/extractor_registry.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <stdexcept>

namespace errlens {

namespace {

void push_unique(std::vector<std::string>& out, const std::string& v)
{
    if (std::find(out.begin(), out.end(), v) == out.end())
        out.push_back(v);
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

std::optional<double> parse_double(const std::string& s)
{
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

const Fact* sample_of(const FactSet& facts, const std::string& data)
{
    for (const auto* f : facts.named("has_sample_data"))
        if (f->arg(0) == data)
            return f;
    return nullptr;
}

const Fact* assignment_at(const FactSet& facts, const std::string& anchor)
{
    for (const auto* f : facts.named("assigns"))
        if (f->arg(0) == anchor)
            return f;
    return nullptr;
}

const Fact* form_at(const FactSet& facts, const std::string& anchor, const std::string& var)
{
    for (const auto* f : facts.named("expr_form"))
        if (f->arg(2) == anchor && f->arg(0) == var)
            return f;
    return nullptr;
}

// relation_code(e, d): the code at anchor e assigns d's dependent variable
// from an expression in d's independent variable.
AtomResult relation_code(const FactSet& facts, std::span<const std::string> args, const MatchConfig&)
{
    const std::string& anchor = args[0];
    const Fact* sample = sample_of(facts, args[1]);
    if (!sample)
        return {};
    const Fact* assign = assignment_at(facts, anchor);
    const Fact* form = form_at(facts, anchor, sample->arg(1));
    if (!assign || !form || assign->arg(1) != sample->arg(2))
        return {};
    return { true, { *sample, *assign, *form } };
}

std::vector<std::string> relation_code_candidates(const FactSet& facts, std::size_t index)
{
    std::vector<std::string> out;
    if (index == 1)
    {
        for (const auto* f : facts.named("has_sample_data"))
            push_unique(out, f->arg(0));
        return out;
    }
    for (const auto* form : facts.named("expr_form"))
        for (const auto* sample : facts.named("has_sample_data"))
        {
            const Fact* assign = assignment_at(facts, form->arg(2));
            if (form->arg(0) == sample->arg(1) && assign && assign->arg(1) == sample->arg(2))
                push_unique(out, form->arg(2));
        }
    return out;
}

// underestimated_growth(d, e): the data behind d is super-linear while the
// code at e is linear (or affine) in d's independent variable.
AtomResult underestimated_growth(const FactSet& facts, std::span<const std::string> args, const MatchConfig& cfg)
{
    const Fact* family = nullptr;
    for (const auto* f : facts.named("data_family"))
        if (f->arg(0) == args[0])
            family = f;
    const Fact* sample = sample_of(facts, args[0]);
    if (!family || !sample)
        return {};
    const auto shape = parse_double(family->arg(3));
    if (!shape)
        return {};
    const bool superlinear = (family->arg(1) == "POWER" && *shape >= 1.0 + cfg.superlinearity_margin)
        || (family->arg(1) == "EXP" && *shape > 1.0);
    if (!superlinear)
        return {};
    const Fact* form = form_at(facts, args[1], sample->arg(1));
    if (!form || !starts_with(form->arg(1), "linear{"))
        return {};
    return { true, { *form, *family } };
}

std::vector<std::string> underestimated_growth_candidates(const FactSet& facts, std::size_t index)
{
    std::vector<std::string> out;
    if (index == 0)
    {
        for (const auto* f : facts.named("data_family"))
            push_unique(out, f->arg(0));
        return out;
    }
    for (const auto* f : facts.named("expr_form"))
        if (starts_with(f->arg(1), "linear{"))
            push_unique(out, f->arg(2));
    return out;
}

AtomResult linear_expr(const FactSet& facts, std::span<const std::string> args, const MatchConfig&)
{
    for (const auto* f : facts.named("expr_form"))
        if (f->arg(2) == args[0] && starts_with(f->arg(1), "linear{"))
            return { true, { *f } };
    return {};
}

} // namespace

void ExtractorRegistry::add(ExtractorDef def)
{
    if (find(def.name))
        throw std::invalid_argument("extractor '" + def.name + "' already registered");
    m_defs.push_back(std::move(def));
}

void ExtractorRegistry::add_lookup(std::string name, std::string fact_atom, std::vector<Sort> params,
    std::string provider, std::vector<std::string> fixed)
{
    ExtractorDef def;
    def.name = std::move(name);
    def.params = params;
    def.provider = std::move(provider);
    const std::size_t arity = params.size();
    auto matches = [arity, fixed](const Fact& f, std::span<const std::string> args) {
        if (f.args.size() < arity + fixed.size())
            return false;
        for (std::size_t i = 0; i < arity; ++i)
            if (f.args[i].value != args[i])
                return false;
        for (std::size_t i = 0; i < fixed.size(); ++i)
            if (f.args[arity + i].value != fixed[i])
                return false;
        return true;
    };
    def.evaluate = [fact_atom, matches](const FactSet& facts, std::span<const std::string> args, const MatchConfig&) {
        AtomResult r;
        for (const auto* f : facts.named(fact_atom))
            if (matches(*f, args))
            {
                r.value = true;
                r.support.push_back(*f);
            }
        return r;
    };
    def.candidates = [fact_atom, arity, fixed](const FactSet& facts, std::size_t index) {
        std::vector<std::string> out;
        for (const auto* f : facts.named(fact_atom))
        {
            if (f->args.size() < arity + fixed.size() || index >= f->args.size())
                continue;
            bool ok = true;
            for (std::size_t i = 0; i < fixed.size(); ++i)
                ok = ok && f->args[arity + i].value == fixed[i];
            if (ok)
                push_unique(out, f->args[index].value);
        }
        return out;
    };
    add(std::move(def));
}

void ExtractorRegistry::add_omission_fact(std::string atom) { m_omission_facts.push_back(std::move(atom)); }

const ExtractorDef* ExtractorRegistry::find(std::string_view name) const
{
    for (const auto& d : m_defs)
        if (d.name == name)
            return &d;
    return nullptr;
}

bool ExtractorRegistry::is_omission_fact(std::string_view atom) const
{
    return std::find(m_omission_facts.begin(), m_omission_facts.end(), atom) != m_omission_facts.end();
}

const ExtractorRegistry& ExtractorRegistry::builtin()
{
    static const ExtractorRegistry reg = [] {
        using enum Sort;
        ExtractorRegistry r;
        const std::string fe = "minilang_frontend";
        r.add_lookup("has_sample_data", "has_sample_data", { Data }, fe);
        r.add_lookup("task_decomposed", "task_decomposed", { Goal }, fe);
        r.add_lookup("main_subtask", "main_subtask", { Goal, Goal }, fe);
        r.add_lookup("subgoal_is_last", "subgoal_is_last", { Goal, Goal }, fe);
        r.add_lookup("declared_necessary", "subgoal_necessary", { Goal }, fe, { "true" });
        r.add_lookup("declared_unnecessary", "subgoal_necessary", { Goal }, fe, { "false" });
        r.add_lookup("goal_completed", "goal_completed", { Goal }, fe);
        r.add_lookup("missing_trailer", "missing_trailer", { Anchor }, fe);
        r.add_lookup("unpaired_call", "unpaired_call", { Anchor }, fe);
        r.add_lookup("data_unfittable", "data_unfittable", { Data }, "model_fitter");
        r.add({ "linear_expr", { Anchor }, fe, false, linear_expr,
            [](const FactSet& facts, std::size_t) {
                std::vector<std::string> out;
                for (const auto* f : facts.named("expr_form"))
                    if (starts_with(f->arg(1), "linear{"))
                        push_unique(out, f->arg(2));
                return out;
            } });
        r.add({ "relation_code", { Anchor, Data }, fe, false, relation_code, relation_code_candidates });
        r.add({ "underestimated_growth", { Data, Anchor }, "model_fitter", true, underestimated_growth,
            underestimated_growth_candidates });
        r.add_omission_fact("missing_trailer");
        r.add_omission_fact("unpaired_call");
        return r;
    }();
    return reg;
}

} // namespace errlens
