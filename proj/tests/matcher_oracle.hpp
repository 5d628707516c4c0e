#pragma once

// Brute-force reference for the matcher over the test registry. Shares no
// code with the matcher: explicit truth tables, the full cross product of
// each sort's universe, and direct fact lookups.

#include "errlens/matcher.hpp"

#include "random_catalog.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace testing_support {

using errlens::Answer;
using errlens::Answers;
using errlens::BoundVar;
using errlens::Question;
using errlens::Site;
using errlens::SiteStatus;

// 0 = false, 1 = unknown, 2 = true
inline constexpr int and_table[3][3] = { { 0, 0, 0 }, { 0, 1, 1 }, { 0, 1, 2 } };
inline constexpr int or_table[3][3] = { { 0, 1, 2 }, { 1, 1, 2 }, { 2, 2, 2 } };
inline constexpr int not_table[3] = { 2, 1, 0 };

struct OracleSite
{
    SiteStatus status = SiteStatus::Unmatched;
    std::string message;
    std::vector<Fact> evidence;
    std::vector<Question> questions; // every question, clause order
    std::vector<Question> pending;
    int score = 0;
};

class MatcherOracle
{
public:
    MatcherOracle(const eps::Catalog& c, const FactSet& f, const errlens::minilang::TaskSpec& t)
        : m_cat(c)
        , m_facts(f)
        , m_task(t)
    {}

    std::vector<std::string> universe(Sort s) const
    {
        std::vector<std::string> out;
        auto add = [&](const std::string& v) {
            if (std::find(out.begin(), out.end(), v) == out.end())
                out.push_back(v);
        };
        if (s == Sort::Goal)
            for (const auto* g : m_task.goals())
                add(g->id);
        if (s == Sort::Data)
            for (const auto& d : m_task.sample_data)
                add(d.id);
        for (const auto& f : m_facts.facts)
            for (const auto& a : f.args)
                if (a.sort == s)
                    add(a.value);
        return out;
    }

    /// Variables in first-occurrence order over if then when.
    std::vector<std::pair<std::string, Sort>> variables(const eps::ErrorProneScenario& s) const
    {
        std::vector<std::pair<std::string, Sort>> out;
        std::vector<const eps::Clause*> apps;
        collect(s.if_clause, apps);
        collect(s.when_clause, apps);
        for (const auto* app : apps)
            for (std::size_t i = 0; i < app->args.size(); ++i)
                if (std::none_of(out.begin(), out.end(), [&](auto& v) { return v.first == app->args[i]; }))
                    out.emplace_back(app->args[i], atom(app->atom).params[i].sort);
        return out;
    }

    /// Every binding of the scenario over the full universes.
    std::vector<std::vector<BoundVar>> all_bindings(const eps::ErrorProneScenario& s) const
    {
        std::vector<std::vector<BoundVar>> out { {} };
        for (const auto& [name, sort] : variables(s))
        {
            std::vector<std::vector<BoundVar>> next;
            for (const auto& partial : out)
                for (const auto& v : universe(sort))
                {
                    auto b = partial;
                    b.push_back({ name, sort, v });
                    next.push_back(std::move(b));
                }
            out = std::move(next);
        }
        return out;
    }

    std::vector<Question> questions(const eps::ErrorProneScenario& s, const std::vector<BoundVar>& b,
        const std::string& site_id) const
    {
        std::vector<const eps::Clause*> apps;
        collect(s.if_clause, apps);
        collect(s.when_clause, apps);
        std::vector<Question> out;
        for (const auto* app : apps)
        {
            const auto& a = atom(app->atom);
            if (a.kind != eps::AtomKind::Human)
                continue;
            auto vals = values(*app, b);
            if (std::any_of(out.begin(), out.end(), [&](auto& q) { return q.atom == a.name && q.args == vals; }))
                continue;
            std::string text = a.question_template;
            for (std::size_t i = 0; i < a.params.size(); ++i)
                text = replace_all(text, "{" + a.params[i].name + "}", vals[i]);
            out.push_back({ site_id + ".Q" + std::to_string(out.size() + 1), site_id, a.name, vals, text });
        }
        return out;
    }

    OracleSite evaluate(const eps::ErrorProneScenario& s, const std::vector<BoundVar>& b, const std::string& site_id,
        const Answers& answers) const
    {
        OracleSite o;
        o.questions = questions(s, b, site_id);
        std::vector<Fact> support, mismatch;
        const int v = and_table[eval(s.if_clause, b, o.questions, answers, support, mismatch)]
                               [eval(s.when_clause, b, o.questions, answers, support, mismatch)];
        for (const auto& f : support)
            add_unique(o.evidence, f);

        std::vector<Fact> defect;
        if (s.then.tendency == eps::Tendency::Mismatch)
            defect = mismatch;
        else
        {
            const BoundVar& target = *std::find_if(b.begin(), b.end(), [&](auto& x) { return x.name == s.then.target; });
            for (const auto& f : m_facts.facts)
                if (f.atom == omission_fact())
                    for (const auto& a : f.args)
                        if (a.sort == target.sort && a.value == target.value)
                        {
                            defect.push_back(f);
                            break;
                        }
        }
        for (const auto& f : defect)
            add_unique(o.evidence, f);

        if (s.then.message.empty())
            o.message = std::string(eps::to_string(s.then.tendency)) + " of " + s.then.target;
        else
        {
            o.message = s.then.message;
            for (const auto& x : b)
                o.message = replace_all(o.message, "{" + x.name + "}", x.value);
        }

        int cls = 1;
        if (answers.dismissed.count(site_id))
        {
            o.status = SiteStatus::Dismissed;
            cls = 0;
        }
        else if (v == 2)
        {
            o.status = defect.empty() ? SiteStatus::FlaggedAttention : SiteStatus::FlaggedProbable;
            cls = defect.empty() ? 3 : 4;
        }
        else if (v == 1)
        {
            o.status = SiteStatus::Pending;
            cls = 2;
            for (const auto& q : o.questions)
                if (answer_of(q.id, answers) == 1)
                    o.pending.push_back(q);
        }
        o.score = cls * 10 + static_cast<int>(s.severity);
        return o;
    }

private:
    static void collect(const eps::Clause& c, std::vector<const eps::Clause*>& out)
    {
        if (c.kind == eps::Clause::Kind::Apply)
            out.push_back(&c);
        for (const auto& ch : c.children)
            collect(ch, out);
    }

    static std::string replace_all(std::string s, const std::string& from, const std::string& to)
    {
        std::string out;
        std::size_t pos = 0, hit;
        while ((hit = s.find(from, pos)) != std::string::npos)
        {
            out += s.substr(pos, hit - pos) + to;
            pos = hit + from.size();
        }
        return out + s.substr(pos);
    }

    static void add_unique(std::vector<Fact>& out, const Fact& f)
    {
        if (std::find(out.begin(), out.end(), f) == out.end())
            out.push_back(f);
    }

    static int answer_of(const std::string& qid, const Answers& a)
    {
        auto it = a.answers.find(qid);
        if (it == a.answers.end() || it->second == Answer::Unknown)
            return 1;
        return it->second == Answer::Yes ? 2 : 0;
    }

    const eps::ConditionAtom& atom(const std::string& name) const
    {
        for (const auto& a : m_cat.atoms)
            if (a.name == name)
                return a;
        throw std::logic_error("oracle: unknown atom " + name);
    }

    static std::vector<std::string> values(const eps::Clause& app, const std::vector<BoundVar>& b)
    {
        std::vector<std::string> out;
        for (const auto& arg : app.args)
            for (const auto& x : b)
                if (x.name == arg)
                    out.push_back(x.value);
        return out;
    }

    int eval(const eps::Clause& c, const std::vector<BoundVar>& b, const std::vector<Question>& qs,
        const Answers& answers, std::vector<Fact>& support, std::vector<Fact>& mismatch) const
    {
        switch (c.kind)
        {
            case eps::Clause::Kind::Not:
                return not_table[eval(c.children[0], b, qs, answers, support, mismatch)];
            case eps::Clause::Kind::And:
            case eps::Clause::Kind::Or:
            {
                int v = c.kind == eps::Clause::Kind::And ? 2 : 0;
                for (const auto& ch : c.children)
                {
                    const int w = eval(ch, b, qs, answers, support, mismatch);
                    v = c.kind == eps::Clause::Kind::And ? and_table[v][w] : or_table[v][w];
                }
                return v;
            }
            case eps::Clause::Kind::Apply:
                break;
        }
        const auto& a = atom(c.atom);
        const auto vals = values(c, b);
        if (a.kind == eps::AtomKind::Human)
        {
            for (const auto& q : qs)
                if (q.atom == a.name && q.args == vals)
                    return answer_of(q.id, answers);
            return 1;
        }
        const TestLookup* l = nullptr;
        for (const auto& x : test_lookups())
            if (a.extractor == x.extractor)
                l = &x;
        bool hit = false;
        for (const auto& f : m_facts.facts)
        {
            if (f.atom != l->fact_atom)
                continue;
            bool same = true;
            for (std::size_t i = 0; i < vals.size(); ++i)
                same = same && f.args[i].value == vals[i];
            if (!same)
                continue;
            hit = true;
            support.push_back(f);
            if (l->mismatch)
                mismatch.push_back(f);
        }
        return hit ? 2 : 0;
    }

    const eps::Catalog& m_cat;
    const FactSet& m_facts;
    const errlens::minilang::TaskSpec& m_task;
};

/// A random answer map over the oracle's question ids for the given sites,
/// plus random dismissals.
inline Answers random_answers(std::mt19937& rng, const std::vector<std::vector<Question>>& qs,
    const std::vector<std::string>& site_ids)
{
    Answers a;
    for (const auto& site : qs)
        for (const auto& q : site)
        {
            const int r = pick(rng, 0, 4);
            if (r < 3)
                a.answers[q.id] = static_cast<Answer>(r);
        }
    for (const auto& id : site_ids)
        if (pick(rng, 0, 9) == 0)
            a.dismissed.insert(id);
    return a;
}

/// One random instance checked against the oracle. Returns a description of
/// the first disagreement, or an empty string.
inline std::string check_oracle_instance(std::mt19937& rng)
{
    using namespace errlens;
    CatalogShape shape;
    shape.max_atoms = 4;
    shape.max_scenarios = 3;
    shape.max_depth = 2;
    const eps::Catalog cat = random_catalog(rng, shape);
    const FactSet facts = random_facts(rng, 20);
    const auto task = minilang::parse_task_spec(pick(rng, 0, 1) ? R"({"goals": {"id": "G1", "children": [{"id": "G4"}, {"id": "G2"}]}})"
                                                                : "{}");
    const MatchContext ctx { cat, facts, task, test_registry() };
    const MatcherOracle oracle(cat, facts, task);

    const auto bindings = enumerate_bindings(ctx);
    std::vector<std::vector<Question>> qs;
    std::vector<std::string> ids;
    for (const auto& b : bindings)
    {
        qs.push_back(oracle.questions(*cat.find_scenario(b.scenario_id), b.vars, b.site_id));
        ids.push_back(b.site_id);
    }
    const Answers answers = random_answers(rng, qs, ids);
    const auto sites = match_all(ctx, answers);

    std::ostringstream err;
    if (sites.size() != bindings.size())
        return "site count differs from binding count";
    auto key = [](const std::string& scenario, const std::vector<BoundVar>& vars) {
        std::string k = scenario;
        for (const auto& v : vars)
            k += "|" + v.name + "=" + v.value;
        return k;
    };
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sites.size(); ++i)
    {
        const Site& s = sites[i];
        const auto& scen = *cat.find_scenario(s.scenario_id);
        if (s.id != "S" + std::to_string(i + 1))
            return "site ids not sequential";
        if (!seen.insert(key(s.scenario_id, s.binding.vars)).second)
            return "duplicate binding " + s.id;
        const auto all = oracle.all_bindings(scen);
        if (std::find(all.begin(), all.end(), s.binding.vars) == all.end())
            return "binding outside the universe for " + s.id;
        const OracleSite o = oracle.evaluate(scen, s.binding.vars, s.id, answers);
        if (s.status != o.status)
            err << s.id << ": status " << to_string(s.status) << " vs " << to_string(o.status);
        else if (s.message != o.message)
            err << s.id << ": message '" << s.message << "' vs '" << o.message << "'";
        else if (s.evidence != o.evidence)
            err << s.id << ": evidence differs";
        else if (s.pending_questions != o.pending)
            err << s.id << ": pending questions differ";
        else if (s.score != o.score || s.severity != scen.severity)
            err << s.id << ": score differs";
        else if (questions_for(ctx, scen, s.binding) != o.questions)
            err << s.id << ": question list differs";
        if (!err.str().empty())
            return err.str() + "\n" + eps::serialize_catalog(cat);
    }
    // Bindings the matcher skips must be unmatched whatever the answers.
    for (const auto& scen : cat.scenarios)
        for (const auto& b : oracle.all_bindings(scen))
            if (!seen.count(key(scen.id, b)))
            {
                const auto o = oracle.evaluate(scen, b, "skipped", Answers {});
                if (o.status != SiteStatus::Unmatched)
                    return "skipped binding of " + scen.id + " evaluates to " + to_string(o.status) + "\n"
                        + eps::serialize_catalog(cat);
            }
    return {};
}

} // namespace testing_support
