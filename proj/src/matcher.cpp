#include "errlens/matcher.hpp"

#include <algorithm>

namespace errlens {

using eps::AtomKind;
using eps::Clause;

Tri tri_and(Tri a, Tri b) { return std::min(a, b); }
Tri tri_or(Tri a, Tri b) { return std::max(a, b); }

Tri tri_not(Tri a)
{
    switch (a)
    {
        case Tri::False: return Tri::True;
        case Tri::True: return Tri::False;
        default: return Tri::Unknown;
    }
}

const char* to_string(Answer a)
{
    switch (a)
    {
        case Answer::Yes: return "yes";
        case Answer::No: return "no";
        case Answer::Unknown: return "unknown";
    }
    return "?";
}

std::optional<Answer> answer_from_string(std::string_view s)
{
    for (auto a : { Answer::Yes, Answer::No, Answer::Unknown })
        if (s == to_string(a))
            return a;
    return std::nullopt;
}

const char* to_string(SiteStatus s)
{
    switch (s)
    {
        case SiteStatus::FlaggedProbable: return "flagged_probable";
        case SiteStatus::FlaggedAttention: return "flagged_attention";
        case SiteStatus::Pending: return "pending";
        case SiteStatus::Unmatched: return "unmatched";
        case SiteStatus::Dismissed: return "dismissed";
    }
    return "?";
}

std::optional<SiteStatus> site_status_from_string(std::string_view s)
{
    for (auto st : { SiteStatus::FlaggedProbable, SiteStatus::FlaggedAttention, SiteStatus::Pending,
             SiteStatus::Unmatched, SiteStatus::Dismissed })
        if (s == to_string(st))
            return st;
    return std::nullopt;
}

const std::string* Binding::value_of(std::string_view var) const
{
    for (const auto& v : vars)
        if (v.name == var)
            return &v.value;
    return nullptr;
}

MatchConfig match_config_for(const minilang::TaskSpec& task)
{
    return MatchConfig { task.config.superlinearity_margin };
}

int site_score(SiteStatus status, eps::Level severity)
{
    int cls = 0;
    switch (status)
    {
        case SiteStatus::FlaggedProbable: cls = 4; break;
        case SiteStatus::FlaggedAttention: cls = 3; break;
        case SiteStatus::Pending: cls = 2; break;
        case SiteStatus::Unmatched: cls = 1; break;
        case SiteStatus::Dismissed: cls = 0; break;
    }
    return cls * 10 + static_cast<int>(severity);
}

namespace {

void push_unique(std::vector<std::string>& out, const std::string& v)
{
    if (std::find(out.begin(), out.end(), v) == out.end())
        out.push_back(v);
}

// Applications every satisfying assignment needs: reachable from the root
// through `and` only. Narrowing a variable to their candidates is sound.
void required_applications(const Clause& c, std::vector<const Clause*>& out)
{
    if (c.kind == Clause::Kind::Apply)
        out.push_back(&c);
    else if (c.kind == Clause::Kind::And)
        for (const auto& ch : c.children)
            required_applications(ch, out);
}

void applications(const Clause& c, std::vector<const Clause*>& out)
{
    if (c.kind == Clause::Kind::Apply)
        out.push_back(&c);
    for (const auto& ch : c.children)
        applications(ch, out);
}

std::vector<std::string> sort_universe(const MatchContext& ctx, Sort sort)
{
    std::vector<std::string> out;
    if (sort == Sort::Goal)
        for (const auto* g : ctx.task.goals())
            push_unique(out, g->id);
    if (sort == Sort::Data)
        for (const auto& s : ctx.task.sample_data)
            push_unique(out, s.id);
    for (const auto& f : ctx.facts.facts)
        for (const auto& a : f.args)
            if (a.sort == sort)
                push_unique(out, a.value);
    return out;
}

std::vector<std::string> candidates(const MatchContext& ctx, const eps::ErrorProneScenario& s, const eps::Param& var)
{
    std::vector<const Clause*> apps;
    required_applications(s.if_clause, apps);
    bool generated = false;
    std::vector<std::string> out;
    for (const auto* app : apps)
    {
        const auto* atom = ctx.catalog.find_atom(app->atom);
        if (!atom || atom->kind != AtomKind::Auto)
            continue;
        const auto* def = ctx.registry.find(atom->extractor);
        if (!def)
            continue;
        for (std::size_t i = 0; i < app->args.size(); ++i)
        {
            if (app->args[i] != var.name)
                continue;
            generated = true;
            for (const auto& v : def->candidates(ctx.facts, i))
                push_unique(out, v);
        }
    }
    return generated ? out : sort_universe(ctx, var.sort);
}

std::string render_template(const std::string& tmpl, const std::vector<std::pair<std::string, std::string>>& subst)
{
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size())
    {
        const auto open = tmpl.find('{', pos);
        const auto close = open == std::string::npos ? std::string::npos : tmpl.find('}', open);
        if (close == std::string::npos)
        {
            out += tmpl.substr(pos);
            break;
        }
        out += tmpl.substr(pos, open - pos);
        const std::string key = tmpl.substr(open + 1, close - open - 1);
        auto it = std::find_if(subst.begin(), subst.end(), [&](const auto& kv) { return kv.first == key; });
        out += it != subst.end() ? it->second : tmpl.substr(open, close - open + 1);
        pos = close + 1;
    }
    return out;
}

std::vector<std::string> arg_values(const Clause& app, const Binding& b)
{
    std::vector<std::string> vals;
    for (const auto& a : app.args)
    {
        const std::string* v = b.value_of(a);
        vals.push_back(v ? *v : std::string());
    }
    return vals;
}

class Evaluator
{
public:
    Evaluator(const MatchContext& ctx, const Binding& b, const Answers& answers, const std::vector<Question>& qs)
        : m_ctx(ctx)
        , m_binding(b)
        , m_answers(answers)
        , m_questions(qs)
    {}

    // Evaluates every application (no short circuit) so evidence is complete.
    Tri eval(const Clause& c)
    {
        switch (c.kind)
        {
            case Clause::Kind::Apply:
                return apply(c);
            case Clause::Kind::Not:
                return tri_not(eval(c.children.front()));
            case Clause::Kind::And:
            {
                Tri r = Tri::True;
                for (const auto& ch : c.children)
                    r = tri_and(r, eval(ch));
                return r;
            }
            case Clause::Kind::Or:
            {
                Tri r = Tri::False;
                for (const auto& ch : c.children)
                    r = tri_or(r, eval(ch));
                return r;
            }
        }
        return Tri::Unknown;
    }

    std::vector<Fact> support;
    std::vector<Fact> mismatch_support;
    std::vector<Question> unanswered;

private:
    Tri apply(const Clause& c)
    {
        const auto* atom = m_ctx.catalog.find_atom(c.atom);
        if (!atom)
            return Tri::Unknown;
        const auto vals = arg_values(c, m_binding);
        if (atom->kind == AtomKind::Human)
        {
            auto q = std::find_if(m_questions.begin(), m_questions.end(),
                [&](const Question& q) { return q.atom == c.atom && q.args == vals; });
            if (q == m_questions.end())
                return Tri::Unknown;
            auto it = m_answers.answers.find(q->id);
            if (it != m_answers.answers.end() && it->second != Answer::Unknown)
                return it->second == Answer::Yes ? Tri::True : Tri::False;
            if (std::find(unanswered.begin(), unanswered.end(), *q) == unanswered.end())
                unanswered.push_back(*q);
            return Tri::Unknown;
        }
        const auto* def = m_ctx.registry.find(atom->extractor);
        if (!def)
            return Tri::Unknown;
        AtomResult r = def->evaluate(m_ctx.facts, vals, m_ctx.config);
        if (!r.value)
            return Tri::False;
        for (auto& f : r.support)
        {
            if (def->mismatch)
                mismatch_support.push_back(f);
            support.push_back(std::move(f));
        }
        return Tri::True;
    }

    const MatchContext& m_ctx;
    const Binding& m_binding;
    const Answers& m_answers;
    const std::vector<Question>& m_questions;
};

void append_unique(std::vector<Fact>& out, const Fact& f)
{
    if (std::find(out.begin(), out.end(), f) == out.end())
        out.push_back(f);
}

} // namespace

std::vector<Binding> enumerate_bindings(const MatchContext& ctx)
{
    std::vector<const eps::ErrorProneScenario*> scenarios;
    for (const auto& s : ctx.catalog.scenarios)
        scenarios.push_back(&s);
    std::stable_sort(scenarios.begin(), scenarios.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

    std::vector<Binding> out;
    for (const auto* s : scenarios)
    {
        const auto vars = eps::scenario_variables(ctx.catalog, *s);
        std::vector<std::vector<std::string>> cands;
        bool empty = false;
        for (const auto& v : vars)
        {
            cands.push_back(candidates(ctx, *s, v));
            empty = empty || cands.back().empty();
        }
        if (empty)
            continue;
        // Cross product; the first variable varies slowest.
        std::size_t total = 1;
        for (const auto& c : cands)
            total *= c.size();
        for (std::size_t n = 0; n < total; ++n)
        {
            Binding b;
            b.scenario_id = s->id;
            b.vars.resize(vars.size());
            std::size_t rem = n;
            for (std::size_t i = vars.size(); i-- > 0;)
            {
                b.vars[i] = { vars[i].name, vars[i].sort, cands[i][rem % cands[i].size()] };
                rem /= cands[i].size();
            }
            out.push_back(std::move(b));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].site_id = "S" + std::to_string(i + 1);
    return out;
}

std::vector<Question> questions_for(const MatchContext& ctx, const eps::ErrorProneScenario& s, const Binding& b)
{
    std::vector<const Clause*> apps;
    applications(s.if_clause, apps);
    applications(s.when_clause, apps);
    std::vector<Question> out;
    for (const auto* app : apps)
    {
        const auto* atom = ctx.catalog.find_atom(app->atom);
        if (!atom || atom->kind != AtomKind::Human)
            continue;
        const auto vals = arg_values(*app, b);
        if (std::any_of(out.begin(), out.end(), [&](const Question& q) { return q.atom == app->atom && q.args == vals; }))
            continue;
        std::vector<std::pair<std::string, std::string>> subst;
        for (std::size_t i = 0; i < atom->params.size() && i < vals.size(); ++i)
            subst.emplace_back(atom->params[i].name, vals[i]);
        Question q;
        q.id = b.site_id + ".Q" + std::to_string(out.size() + 1);
        q.site_id = b.site_id;
        q.atom = app->atom;
        q.args = vals;
        q.text = render_template(atom->question_template, subst);
        out.push_back(std::move(q));
    }
    return out;
}

Site evaluate_scenario(const MatchContext& ctx, const eps::ErrorProneScenario& s, const Binding& b,
    const Answers& answers)
{
    const auto questions = questions_for(ctx, s, b);
    Evaluator ev(ctx, b, answers, questions);
    const Tri if_value = ev.eval(s.if_clause);
    const Tri when_value = ev.eval(s.when_clause);
    const Tri result = tri_and(if_value, when_value);

    Site site;
    site.id = b.site_id;
    site.scenario_id = s.id;
    site.binding = b;
    site.severity = s.severity;

    std::vector<std::pair<std::string, std::string>> subst;
    for (const auto& v : b.vars)
        subst.emplace_back(v.name, v.value);
    site.message = s.then.message.empty() ? std::string(eps::to_string(s.then.tendency)) + " of " + s.then.target
                                          : render_template(s.then.message, subst);

    for (const auto& f : ev.support)
        append_unique(site.evidence, f);

    std::vector<Fact> defect_evidence;
    if (s.then.tendency == eps::Tendency::Mismatch)
        defect_evidence = ev.mismatch_support;
    else if (const std::string* target = b.value_of(s.then.target))
    {
        Sort target_sort = Sort::Goal;
        for (const auto& v : b.vars)
            if (v.name == s.then.target)
                target_sort = v.sort;
        for (const auto& f : ctx.facts.facts)
        {
            if (!ctx.registry.is_omission_fact(f.atom))
                continue;
            if (std::any_of(f.args.begin(), f.args.end(),
                    [&](const minilang::FactArg& a) { return a.sort == target_sort && a.value == *target; }))
                defect_evidence.push_back(f);
        }
    }
    for (const auto& f : defect_evidence)
        append_unique(site.evidence, f);

    if (answers.dismissed.count(site.id))
        site.status = SiteStatus::Dismissed;
    else if (result == Tri::True)
        site.status = defect_evidence.empty() ? SiteStatus::FlaggedAttention : SiteStatus::FlaggedProbable;
    else if (result == Tri::False)
        site.status = SiteStatus::Unmatched;
    else
    {
        site.status = SiteStatus::Pending;
        site.pending_questions = ev.unanswered;
    }
    site.score = site_score(site.status, site.severity);
    return site;
}

std::vector<Site> match_all(const MatchContext& ctx, const Answers& answers)
{
    std::vector<Site> out;
    for (const auto& b : enumerate_bindings(ctx))
        out.push_back(evaluate_scenario(ctx, *ctx.catalog.find_scenario(b.scenario_id), b, answers));
    return out;
}

std::vector<Site> rank_sites(std::vector<Site> sites)
{
    std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.score > b.score; });
    return sites;
}

} // namespace errlens
