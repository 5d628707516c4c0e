#include "errlens/session/report.hpp"

#include "errlens/json_io.hpp"
#include "errlens/minilang/expression_form.hpp"

#include <sstream>

namespace errlens::session {

using nlohmann::json;
using minilang::format_number;

std::optional<ReportFormat> report_format_from_string(std::string_view s)
{
    if (s == "text")
        return ReportFormat::Text;
    if (s == "structured" || s == "json")
        return ReportFormat::Structured;
    return std::nullopt;
}

Report build_report(const eps::Catalog& catalog, std::vector<InputRef> inputs, const std::vector<Site>& ranked,
    std::vector<TranscriptEntry> transcript, std::vector<DefectRecord> defects)
{
    Report r;
    r.catalog_name = catalog.name;
    r.catalog_version = catalog.version;
    r.inputs = std::move(inputs);
    int rank = 0;
    for (const auto& s : ranked)
    {
        RankedSite rs;
        rs.rank = ++rank;
        rs.site = s;
        if (const auto* sc = catalog.find_scenario(s.scenario_id))
        {
            rs.mode_id = sc->mode_id;
            if (const auto* m = catalog.find_mode(sc->mode_id))
                rs.mode_name = m->name;
        }
        r.sites.push_back(std::move(rs));
    }
    r.transcript = std::move(transcript);
    r.timing = compute_timing_metrics(defects);
    r.defects = std::move(defects);
    return r;
}

json to_json(const TranscriptEntry& t)
{
    return { { "seq", t.seq }, { "kind", t.kind }, { "subject", t.subject }, { "text", t.text }, { "value", t.value },
        { "overwrite", t.overwrite }, { "minutes_from_start", t.minutes_from_start } };
}

TranscriptEntry transcript_from_json(const json& j)
{
    TranscriptEntry t;
    t.seq = j.at("seq").get<int>();
    t.kind = j.at("kind").get<std::string>();
    t.subject = j.at("subject").get<std::string>();
    t.text = j.at("text").get<std::string>();
    t.value = j.at("value").get<std::string>();
    t.overwrite = j.at("overwrite").get<bool>();
    t.minutes_from_start = j.at("minutes_from_start").get<double>();
    return t;
}

json to_json(const InputRef& r) { return { { "role", r.role }, { "path", r.path }, { "sha256", r.sha256 } }; }

InputRef input_from_json(const json& j)
{
    return { j.at("role").get<std::string>(), j.at("path").get<std::string>(), j.at("sha256").get<std::string>() };
}

json to_json(const Report& r)
{
    json j;
    j["catalog"] = { { "name", r.catalog_name }, { "version", r.catalog_version } };
    j["inputs"] = json::array();
    for (const auto& i : r.inputs)
        j["inputs"].push_back(to_json(i));
    if (r.session_id)
        j["session_id"] = *r.session_id;
    if (r.started_at)
        j["started_at"] = *r.started_at;
    j["sites"] = json::array();
    for (const auto& s : r.sites)
    {
        json sj = errlens::to_json(s.site);
        sj["rank"] = s.rank;
        sj["mode"] = { { "id", s.mode_id }, { "name", s.mode_name } };
        j["sites"].push_back(std::move(sj));
    }
    j["transcript"] = json::array();
    for (const auto& t : r.transcript)
        j["transcript"].push_back(to_json(t));
    j["defects"] = json::array();
    for (const auto& d : r.defects)
        j["defects"].push_back(errlens::to_json(d));
    j["timing"] = errlens::to_json(r.timing);
    return j;
}

Report report_from_json(const json& j)
{
    Report r;
    r.catalog_name = j.at("catalog").at("name").get<std::string>();
    r.catalog_version = j.at("catalog").at("version").get<std::string>();
    for (const auto& i : j.at("inputs"))
        r.inputs.push_back(input_from_json(i));
    if (j.contains("session_id"))
        r.session_id = j["session_id"].get<std::string>();
    if (j.contains("started_at"))
        r.started_at = j["started_at"].get<std::string>();
    for (const auto& sj : j.at("sites"))
    {
        RankedSite rs;
        rs.rank = sj.at("rank").get<int>();
        rs.mode_id = sj.at("mode").at("id").get<std::string>();
        rs.mode_name = sj.at("mode").at("name").get<std::string>();
        rs.site = site_from_json(sj);
        r.sites.push_back(std::move(rs));
    }
    for (const auto& t : j.at("transcript"))
        r.transcript.push_back(transcript_from_json(t));
    for (const auto& d : j.at("defects"))
        r.defects.push_back(defect_from_json(d));
    r.timing = timing_from_json(j.at("timing"));
    return r;
}

namespace {

std::string span_text(const SourceSpan& s)
{
    return std::to_string(s.line) + ":" + std::to_string(s.column) + "-" + std::to_string(s.end_line) + ":"
        + std::to_string(s.end_column);
}

std::string minutes(double m) { return format_number(m) + " min"; }

} // namespace

std::string render_text(const Report& r)
{
    std::ostringstream out;
    out << "inspection report\n";
    out << "catalog: " << r.catalog_name;
    if (!r.catalog_version.empty())
        out << " " << r.catalog_version;
    out << "\n";
    if (r.session_id)
        out << "session: " << *r.session_id << "\n";
    if (r.started_at)
        out << "started: " << *r.started_at << "\n";
    for (const auto& i : r.inputs)
        out << "input " << i.role << ": " << i.path << " sha256:" << i.sha256 << "\n";

    out << "\nsites (" << r.sites.size() << ")\n";
    for (const auto& rs : r.sites)
    {
        const auto& s = rs.site;
        out << "#" << rs.rank << " " << s.id << " " << s.scenario_id << " [" << to_string(s.status) << ", "
            << eps::to_string(s.severity) << "] score " << s.score << "\n";
        if (!rs.mode_name.empty())
            out << "   mode: " << rs.mode_name << "\n";
        out << "   binding:";
        for (const auto& v : s.binding.vars)
            out << " " << v.name << "=" << v.value;
        out << "\n";
        if (!s.message.empty() && (is_flagged(s.status) || s.status == SiteStatus::Pending))
            out << "   message: " << s.message << "\n";
        for (const auto& f : s.evidence)
        {
            out << "   evidence: " << f.render() << " [" << f.provenance << "]";
            for (const auto& sp : f.evidence)
                out << " @" << span_text(sp);
            if (f.task_path)
                out << " task " << *f.task_path;
            out << "\n";
        }
        for (const auto& q : s.pending_questions)
            out << "   question " << q.id << ": " << q.text << "\n";
    }

    out << "\ntranscript (" << r.transcript.size() << ")\n";
    for (const auto& t : r.transcript)
    {
        out << t.seq << ". +" << minutes(t.minutes_from_start) << " " << t.kind << " " << t.subject;
        if (t.kind == "answer")
            out << " = " << t.value << (t.overwrite ? " (overwrite)" : "") << ": " << t.text;
        out << "\n";
    }

    out << "\ndefects (" << r.defects.size() << ")\n";
    for (const auto& d : r.defects)
    {
        out << d.id << " +" << minutes(d.minutes_from_start) << " " << (d.targeted ? "targeted" : "other");
        if (d.linked_site)
            out << " site " << *d.linked_site;
        out << ": " << d.description << "\n";
    }

    out << "\ntiming\n";
    out << "targeted (" << r.timing.targeted_count << "):";
    if (r.timing.targeted.empty())
        out << " none";
    for (const auto& t : r.timing.targeted)
        out << " " << t.defect_id << "=" << minutes(t.minutes);
    out << "\n";
    out << "mean other (" << r.timing.other_count << "): "
        << (r.timing.mean_other_minutes ? minutes(*r.timing.mean_other_minutes) : std::string("n/a")) << "\n";
    return out.str();
}

std::string render_structured(const Report& r) { return to_json(r).dump(2) + "\n"; }

std::string render(const Report& r, ReportFormat f)
{
    return f == ReportFormat::Text ? render_text(r) : render_structured(r);
}

} // namespace errlens::session
