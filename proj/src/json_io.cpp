#include "errlens/json_io.hpp"

#include <stdexcept>

namespace errlens {

using nlohmann::json;

namespace {

eps::Level level_from_string(const std::string& s)
{
    for (auto l : { eps::Level::Low, eps::Level::Medium, eps::Level::High })
        if (s == eps::to_string(l))
            return l;
    throw std::invalid_argument("unknown severity '" + s + "'");
}

Sort sort_or_throw(const std::string& s)
{
    if (auto v = minilang::sort_from_string(s))
        return *v;
    throw std::invalid_argument("unknown sort '" + s + "'");
}

} // namespace

json to_json(const SourceSpan& s)
{
    return { { "begin", s.begin }, { "end", s.end }, { "line", s.line }, { "column", s.column },
        { "end_line", s.end_line }, { "end_column", s.end_column } };
}

SourceSpan span_from_json(const json& j)
{
    SourceSpan s;
    s.begin = j.at("begin").get<std::size_t>();
    s.end = j.at("end").get<std::size_t>();
    s.line = j.at("line").get<int>();
    s.column = j.at("column").get<int>();
    s.end_line = j.at("end_line").get<int>();
    s.end_column = j.at("end_column").get<int>();
    return s;
}

json to_json(const Fact& f)
{
    json args = json::array();
    for (const auto& a : f.args)
        args.push_back({ { "sort", minilang::to_string(a.sort) }, { "value", a.value } });
    json ev = json::array();
    for (const auto& s : f.evidence)
        ev.push_back(to_json(s));
    json j = { { "atom", f.atom }, { "args", args }, { "text", f.render() }, { "evidence", ev },
        { "provenance", f.provenance } };
    j["task_path"] = f.task_path ? json(*f.task_path) : json(nullptr);
    return j;
}

Fact fact_from_json(const json& j)
{
    Fact f;
    f.atom = j.at("atom").get<std::string>();
    for (const auto& a : j.at("args"))
        f.args.push_back({ sort_or_throw(a.at("sort").get<std::string>()), a.at("value").get<std::string>() });
    for (const auto& s : j.at("evidence"))
        f.evidence.push_back(span_from_json(s));
    if (j.contains("task_path") && !j["task_path"].is_null())
        f.task_path = j["task_path"].get<std::string>();
    f.provenance = j.at("provenance").get<std::string>();
    return f;
}

json to_json(const Question& q)
{
    return { { "id", q.id }, { "site", q.site_id }, { "atom", q.atom }, { "args", q.args }, { "text", q.text },
        { "answer_domain", { "yes", "no", "unknown" } } };
}

Question question_from_json(const json& j)
{
    Question q;
    q.id = j.at("id").get<std::string>();
    q.site_id = j.at("site").get<std::string>();
    q.atom = j.at("atom").get<std::string>();
    q.args = j.at("args").get<std::vector<std::string>>();
    q.text = j.at("text").get<std::string>();
    return q;
}

json to_json(const Site& s)
{
    json binding = json::array();
    for (const auto& v : s.binding.vars)
        binding.push_back({ { "var", v.name }, { "sort", minilang::to_string(v.sort) }, { "value", v.value } });
    json evidence = json::array();
    for (const auto& f : s.evidence)
        evidence.push_back(to_json(f));
    json questions = json::array();
    for (const auto& q : s.pending_questions)
        questions.push_back(to_json(q));
    return { { "id", s.id }, { "scenario", s.scenario_id }, { "status", to_string(s.status) },
        { "severity", eps::to_string(s.severity) }, { "score", s.score }, { "message", s.message },
        { "binding", binding }, { "evidence", evidence }, { "pending_questions", questions } };
}

Site site_from_json(const json& j)
{
    Site s;
    s.id = j.at("id").get<std::string>();
    s.scenario_id = j.at("scenario").get<std::string>();
    const auto status = site_status_from_string(j.at("status").get<std::string>());
    if (!status)
        throw std::invalid_argument("unknown site status");
    s.status = *status;
    s.severity = level_from_string(j.at("severity").get<std::string>());
    s.score = j.at("score").get<int>();
    s.message = j.at("message").get<std::string>();
    s.binding.site_id = s.id;
    s.binding.scenario_id = s.scenario_id;
    for (const auto& v : j.at("binding"))
        s.binding.vars.push_back(
            { v.at("var").get<std::string>(), sort_or_throw(v.at("sort").get<std::string>()), v.at("value").get<std::string>() });
    for (const auto& f : j.at("evidence"))
        s.evidence.push_back(fact_from_json(f));
    for (const auto& q : j.at("pending_questions"))
        s.pending_questions.push_back(question_from_json(q));
    return s;
}

json to_json(const std::vector<Site>& sites)
{
    json arr = json::array();
    for (const auto& s : sites)
        arr.push_back(to_json(s));
    return arr;
}

json to_json(const session::DefectRecord& d)
{
    return { { "id", d.id }, { "description", d.description }, { "minutes_from_start", d.minutes_from_start },
        { "linked_site", d.linked_site ? json(*d.linked_site) : json(nullptr) }, { "targeted", d.targeted } };
}

session::DefectRecord defect_from_json(const json& j)
{
    session::DefectRecord d;
    d.id = j.at("id").get<std::string>();
    d.description = j.at("description").get<std::string>();
    d.minutes_from_start = j.at("minutes_from_start").get<double>();
    if (j.contains("linked_site") && !j["linked_site"].is_null())
        d.linked_site = j["linked_site"].get<std::string>();
    d.targeted = j.at("targeted").get<bool>();
    return d;
}

json to_json(const session::TimingMetrics& m)
{
    json targeted = json::array();
    for (const auto& t : m.targeted)
        targeted.push_back({ { "defect", t.defect_id }, { "minutes", t.minutes } });
    return { { "targeted", targeted },
        { "mean_other_minutes", m.mean_other_minutes ? json(*m.mean_other_minutes) : json(nullptr) },
        { "targeted_count", m.targeted_count }, { "other_count", m.other_count } };
}

session::TimingMetrics timing_from_json(const json& j)
{
    session::TimingMetrics m;
    for (const auto& t : j.at("targeted"))
        m.targeted.push_back({ t.at("defect").get<std::string>(), t.at("minutes").get<double>() });
    if (!j.at("mean_other_minutes").is_null())
        m.mean_other_minutes = j["mean_other_minutes"].get<double>();
    m.targeted_count = j.at("targeted_count").get<std::size_t>();
    m.other_count = j.at("other_count").get<std::size_t>();
    return m;
}

} // namespace errlens
