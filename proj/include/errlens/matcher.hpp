#pragma once

#include "errlens/eps/catalog.hpp"
#include "errlens/extractor_registry.hpp"
#include "errlens/minilang/facts.hpp"
#include "errlens/minilang/task_spec.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace errlens {

enum class Tri
{
    False,
    Unknown,
    True,
};

/// Kleene connectives: and = min, or = max, not = mirror.
Tri tri_and(Tri a, Tri b);
Tri tri_or(Tri a, Tri b);
Tri tri_not(Tri a);

enum class Answer
{
    Yes,
    No,
    Unknown,
};

const char* to_string(Answer a);
std::optional<Answer> answer_from_string(std::string_view s);

/// Inspector input: question answers plus site dismissals.
struct Answers
{
    std::map<std::string, Answer> answers;
    std::set<std::string> dismissed;

    bool operator==(const Answers&) const = default;
};

struct BoundVar
{
    std::string name;
    Sort sort = Sort::Goal;
    std::string value;

    bool operator==(const BoundVar&) const = default;
};

/// One instantiation of a scenario. `site_id` is S<k> by enumeration order.
struct Binding
{
    std::string site_id;
    std::string scenario_id;
    std::vector<BoundVar> vars;

    const std::string* value_of(std::string_view var) const;
    bool operator==(const Binding&) const = default;
};

enum class SiteStatus
{
    FlaggedProbable,
    FlaggedAttention,
    Pending,
    Unmatched,
    Dismissed,
};

const char* to_string(SiteStatus s);
std::optional<SiteStatus> site_status_from_string(std::string_view s);
inline bool is_flagged(SiteStatus s) { return s == SiteStatus::FlaggedProbable || s == SiteStatus::FlaggedAttention; }

struct Question
{
    std::string id; // <site>.Q<k>
    std::string site_id;
    std::string atom;
    std::vector<std::string> args;
    std::string text;

    bool operator==(const Question&) const = default;
};

struct Site
{
    std::string id;
    std::string scenario_id;
    Binding binding;
    SiteStatus status = SiteStatus::Unmatched;
    eps::Level severity = eps::Level::High;
    std::string message;
    std::vector<Fact> evidence;
    std::vector<Question> pending_questions;
    /// Higher ranks first; status class dominates severity.
    int score = 0;

    bool operator==(const Site&) const = default;
};

/// Read-only matching context.
struct MatchContext
{
    const eps::Catalog& catalog;
    const FactSet& facts;
    const minilang::TaskSpec& task;
    const ExtractorRegistry& registry = ExtractorRegistry::builtin();
    MatchConfig config {};
};

MatchConfig match_config_for(const minilang::TaskSpec& task);

std::vector<Binding> enumerate_bindings(const MatchContext& ctx);

/// Every question id the scenario could ask for this binding, in clause order.
std::vector<Question> questions_for(const MatchContext& ctx, const eps::ErrorProneScenario& s, const Binding& b);

Site evaluate_scenario(const MatchContext& ctx, const eps::ErrorProneScenario& s, const Binding& b,
    const Answers& answers);

std::vector<Site> match_all(const MatchContext& ctx, const Answers& answers);

/// Stable sort by status class then severity.
std::vector<Site> rank_sites(std::vector<Site> sites);

int site_score(SiteStatus status, eps::Level severity);

} // namespace errlens
