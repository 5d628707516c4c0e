#include "errlens/session/session.hpp"

#include "errlens/json_io.hpp"
#include "errlens/session/digest.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

namespace errlens::session {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(SessionErrorCode c)
{
    switch (c)
    {
    case SessionErrorCode::UnknownSession: return "unknown_session";
    case SessionErrorCode::UnknownQuestion: return "unknown_question";
    case SessionErrorCode::UnknownSite: return "unknown_site";
    case SessionErrorCode::Conflict: return "conflict";
    case SessionErrorCode::InvalidArgument: return "invalid_argument";
    case SessionErrorCode::VersionMismatch: return "version_mismatch";
    case SessionErrorCode::HashMismatch: return "hash_mismatch";
    case SessionErrorCode::StateMismatch: return "state_mismatch";
    case SessionErrorCode::Io: return "io_error";
    case SessionErrorCode::Corrupt: return "corrupt_session";
    }
    return "?";
}

// ---------------------------------------------------------------- inputs

std::string read_input(const std::string& path)
{
    if (path == builtin_catalog)
        return std::string(eps::shipped_catalog_text());
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SessionError(SessionErrorCode::Io, "cannot read input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

// Re-throws parse diagnostics with the document they came from.
template <typename F>
auto with_path(const std::string& path, F&& f)
{
    try
    {
        return f();
    }
    catch (const InputError& e)
    {
        auto ds = e.diagnostics();
        for (auto& d : ds)
            d.element = d.element.empty() ? path : path + "#" + d.element;
        throw InputError(std::move(ds));
    }
}

} // namespace

std::shared_ptr<const Workspace> Workspace::from_texts(InputText program, InputText task, InputText catalog,
    std::optional<InputText> facts)
{
    std::shared_ptr<Workspace> ws(new Workspace());
    ws->m_program = with_path(program.path, [&] { return minilang::parse_program(program.text); });
    ws->m_task = with_path(task.path, [&] { return minilang::parse_task_spec(task.text); });
    ws->m_catalog = with_path(catalog.path, [&] { return eps::parse_catalog(catalog.text); });
    ws->m_facts = minilang::extract_facts(ws->m_program, ws->m_task);
    ws->m_inputs = { { "program", program.path, sha256_hex(program.text) }, { "task", task.path, sha256_hex(task.text) },
        { "catalog", catalog.path, sha256_hex(catalog.text) } };
    if (facts)
    {
        auto extra = with_path(facts->path, [&] { return minilang::parse_fact_document(facts->text); });
        ws->m_facts.append(extra);
        ws->m_inputs.push_back({ "facts", facts->path, sha256_hex(facts->text) });
    }
    return ws;
}

std::shared_ptr<const Workspace> Workspace::load(const fs::path& program, const fs::path& task,
    const std::string& catalog, const std::optional<fs::path>& facts)
{
    auto read = [](const fs::path& p) { return InputText { p.string(), read_input(p.string()) }; };
    std::optional<InputText> f;
    if (facts)
        f = read(*facts);
    const std::string cat = catalog.empty() ? std::string(builtin_catalog) : catalog;
    return from_texts(read(program), read(task), { cat, read_input(cat) }, std::move(f));
}

MatchContext Workspace::context() const
{
    return MatchContext { m_catalog, m_facts, m_task, ExtractorRegistry::builtin(), match_config_for(m_task) };
}

// --------------------------------------------------------------- session

Session Session::start(std::shared_ptr<const Workspace> ws, std::string id, const Clock& clock)
{
    if (!valid_session_id(id))
        throw SessionError(SessionErrorCode::InvalidArgument, "invalid session id '" + id + "'");
    Session s;
    s.m_ws = std::move(ws);
    s.m_clock = &clock;
    s.m_id = std::move(id);
    s.m_started_wall_ms = clock.wall_ms();
    s.m_started_steady_ns = clock.steady_ns();
    s.recompute();
    return s;
}

void Session::recompute()
{
    const auto ctx = m_ws->context();
    m_sites = rank_sites(match_all(ctx, m_answers));
    m_questions.clear();
    for (const auto& b : enumerate_bindings(ctx))
    {
        const auto* sc = ctx.catalog.find_scenario(b.scenario_id);
        for (auto& q : questions_for(ctx, *sc, b))
            m_questions.push_back(std::move(q));
    }
    for (auto& d : m_defects)
    {
        d.targeted = false;
        if (!d.linked_site)
            continue;
        for (const auto& s : m_sites)
            if (s.id == *d.linked_site)
                d.targeted = is_flagged(s.status);
    }
}

double Session::minutes_now() const
{
    const std::int64_t steady = m_clock->steady_ns();
    double m = steady >= m_started_steady_ns ? static_cast<double>(steady - m_started_steady_ns) / 60e9
                                             : static_cast<double>(m_clock->wall_ms() - m_started_wall_ms) / 60e3;
    m = std::max(m, 0.0);
    if (!m_defects.empty())
        m = std::max(m, m_defects.back().minutes_from_start);
    if (!m_transcript.empty())
        m = std::max(m, m_transcript.back().minutes_from_start);
    return m;
}

const Question* Session::find_question(const std::string& id) const
{
    for (const auto& q : m_questions)
        if (q.id == id)
            return &q;
    return nullptr;
}

std::vector<Question> Session::pending_questions() const
{
    std::vector<Question> out;
    for (const auto& s : m_sites)
        if (s.status == SiteStatus::Pending)
            out.insert(out.end(), s.pending_questions.begin(), s.pending_questions.end());
    return out;
}

AnswerResult Session::submit_answer(const std::string& question_id, Answer answer, bool overwrite)
{
    const Question* q = find_question(question_id);
    if (!q)
        throw SessionError(SessionErrorCode::UnknownQuestion, "unknown question '" + question_id + "'");
    auto it = m_answers.answers.find(question_id);
    if (it != m_answers.answers.end() && it->second == answer)
        return { false, m_sites };
    const bool replaces = it != m_answers.answers.end() && it->second != Answer::Unknown;
    if (replaces && !overwrite)
        throw SessionError(SessionErrorCode::Conflict,
            "question '" + question_id + "' is already answered '" + to_string(it->second)
                + "'; resubmit with overwrite to replace it");
    TranscriptEntry t;
    t.seq = static_cast<int>(m_transcript.size()) + 1;
    t.kind = "answer";
    t.subject = question_id;
    t.text = q->text;
    t.value = to_string(answer);
    t.overwrite = replaces;
    t.minutes_from_start = minutes_now();
    m_answers.answers[question_id] = answer;
    m_transcript.push_back(std::move(t));
    recompute();
    return { true, m_sites };
}

DefectRecord Session::log_defect(const std::string& description, const std::optional<std::string>& site)
{
    if (site && std::none_of(m_sites.begin(), m_sites.end(), [&](const Site& s) { return s.id == *site; }))
        throw SessionError(SessionErrorCode::UnknownSite, "unknown site '" + *site + "'");
    DefectRecord d;
    d.id = "D" + std::to_string(m_defects.size() + 1);
    d.description = description;
    d.minutes_from_start = minutes_now();
    d.linked_site = site;
    m_defects.push_back(std::move(d));
    recompute();
    return m_defects.back();
}

void Session::dismiss(const std::string& site_id, bool dismissed)
{
    if (std::none_of(m_sites.begin(), m_sites.end(), [&](const Site& s) { return s.id == site_id; }))
        throw SessionError(SessionErrorCode::UnknownSite, "unknown site '" + site_id + "'");
    if (m_answers.dismissed.contains(site_id) == dismissed)
        return;
    TranscriptEntry t;
    t.seq = static_cast<int>(m_transcript.size()) + 1;
    t.kind = dismissed ? "dismiss" : "restore";
    t.subject = site_id;
    t.minutes_from_start = minutes_now();
    if (dismissed)
        m_answers.dismissed.insert(site_id);
    else
        m_answers.dismissed.erase(site_id);
    m_transcript.push_back(std::move(t));
    recompute();
}

Report Session::report(bool include_session) const
{
    Report r = build_report(m_ws->catalog(), m_ws->inputs(), m_sites, m_transcript, m_defects);
    if (include_session)
    {
        r.session_id = m_id;
        r.started_at = started_at();
    }
    return r;
}

// ----------------------------------------------------------- persistence

json Session::to_json() const
{
    json j;
    j["format_version"] = session_format_version;
    j["id"] = m_id;
    j["inputs"] = json::array();
    for (const auto& i : m_ws->inputs())
        j["inputs"].push_back(session::to_json(i));
    j["started_at"] = started_at();
    j["started_wall_ms"] = m_started_wall_ms;
    j["started_steady_ns"] = m_started_steady_ns;
    j["answers"] = json::object();
    for (const auto& [k, v] : m_answers.answers)
        j["answers"][k] = to_string(v);
    j["dismissed"] = m_answers.dismissed;
    j["transcript"] = json::array();
    for (const auto& t : m_transcript)
        j["transcript"].push_back(session::to_json(t));
    j["defects"] = json::array();
    for (const auto& d : m_defects)
        j["defects"].push_back(errlens::to_json(d));
    j["sites"] = errlens::to_json(m_sites);
    return j;
}

Session Session::from_json(const json& j, const Clock& clock)
{
    const auto corrupt = [](const std::string& why) { return SessionError(SessionErrorCode::Corrupt, why); };
    if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer())
        throw corrupt("session file has no format_version");
    const int version = j["format_version"].get<int>();
    if (version != session_format_version)
        throw SessionError(SessionErrorCode::VersionMismatch,
            "session file format version " + std::to_string(version) + " is not supported (expected "
                + std::to_string(session_format_version) + ")");
    try
    {
        std::optional<InputText> program, task, catalog, facts;
        for (const auto& ij : j.at("inputs"))
        {
            const InputRef ref = input_from_json(ij);
            InputText t { ref.path, read_input(ref.path) };
            if (sha256_hex(t.text) != ref.sha256)
                throw SessionError(SessionErrorCode::HashMismatch,
                    "input file '" + ref.path + "' changed since the session started (sha256 mismatch)");
            if (ref.role == "program")
                program = std::move(t);
            else if (ref.role == "task")
                task = std::move(t);
            else if (ref.role == "catalog")
                catalog = std::move(t);
            else if (ref.role == "facts")
                facts = std::move(t);
            else
                throw corrupt("unknown input role '" + ref.role + "'");
        }
        if (!program || !task || !catalog)
            throw corrupt("session file lacks an input document");

        Session s;
        s.m_ws = Workspace::from_texts(std::move(*program), std::move(*task), std::move(*catalog), std::move(facts));
        s.m_clock = &clock;
        s.m_id = j.at("id").get<std::string>();
        if (!valid_session_id(s.m_id))
            throw corrupt("invalid session id '" + s.m_id + "'");
        s.m_started_wall_ms = j.at("started_wall_ms").get<std::int64_t>();
        s.m_started_steady_ns = j.at("started_steady_ns").get<std::int64_t>();
        for (const auto& [k, v] : j.at("answers").items())
        {
            const auto a = answer_from_string(v.get<std::string>());
            if (!a)
                throw corrupt("bad answer for '" + k + "'");
            s.m_answers.answers[k] = *a;
        }
        for (const auto& d : j.at("dismissed"))
            s.m_answers.dismissed.insert(d.get<std::string>());
        for (const auto& t : j.at("transcript"))
            s.m_transcript.push_back(transcript_from_json(t));
        for (const auto& d : j.at("defects"))
            s.m_defects.push_back(defect_from_json(d));
        const auto stored_defects = s.m_defects;
        s.recompute();
        if (errlens::to_json(s.m_sites) != j.at("sites") || s.m_defects != stored_defects)
            throw SessionError(SessionErrorCode::StateMismatch,
                "stored sites of session '" + s.m_id + "' differ from a fresh evaluation of its inputs");
        return s;
    }
    catch (const json::exception& e)
    {
        throw corrupt(std::string("malformed session file: ") + e.what());
    }
    catch (const std::invalid_argument& e)
    {
        throw corrupt(std::string("malformed session file: ") + e.what());
    }
}

fs::path Session::file_for(const fs::path& store, const std::string& id) { return store / (id + ".json"); }

void Session::save(const fs::path& store) const
{
    std::error_code ec;
    fs::create_directories(store, ec);
    const fs::path target = file_for(store, m_id);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw SessionError(SessionErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out << to_json().dump(2) << "\n";
        if (!out.flush())
            throw SessionError(SessionErrorCode::Io, "cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, target, ec);
    if (ec)
        throw SessionError(SessionErrorCode::Io, "cannot replace '" + target.string() + "': " + ec.message());
}

Session Session::load(const fs::path& file, const Clock& clock)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw SessionError(SessionErrorCode::UnknownSession, "no session file '" + file.string() + "'");
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (const json::exception& e)
    {
        throw SessionError(SessionErrorCode::Corrupt, "malformed session file '" + file.string() + "': " + e.what());
    }
    return from_json(j, clock);
}

bool valid_session_id(std::string_view id)
{
    static const std::regex re("[A-Za-z0-9][A-Za-z0-9_-]{0,63}");
    return std::regex_match(id.begin(), id.end(), re);
}

std::string generate_session_id()
{
    std::random_device rd;
    std::uniform_int_distribution<int> hex(0, 15);
    std::string id;
    for (int i = 0; i < 12; ++i)
        id += "0123456789abcdef"[hex(rd)];
    return id;
}

// ---------------------------------------------------------------- replay

namespace {

[[noreturn]] void script_error(const std::string& element, const std::string& message)
{
    Diagnostic d;
    d.code = "answers_file";
    d.message = message;
    d.element = element;
    throw InputError({ d });
}

double at_minutes(const json& j, const std::string& where)
{
    if (!j.contains("at_minutes"))
        return 0.0;
    if (!j["at_minutes"].is_number() || j["at_minutes"].get<double>() < 0)
        script_error(where + "/at_minutes", "at_minutes must be a nonnegative number");
    return j["at_minutes"].get<double>();
}

void known_keys(const json& j, std::initializer_list<std::string_view> keys, const std::string& where)
{
    for (const auto& [k, v] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            script_error(where + "/" + k, "unknown key '" + k + "'");
}

std::string string_field(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j[key].is_string())
        script_error(where + "/" + key, std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
}

ReplayEvent answer_event(const json& j, const std::string& where)
{
    if (!j.is_object())
        script_error(where, "answer entry must be an object");
    known_keys(j, { "question_id", "answer", "overwrite", "at_minutes" }, where);
    ReplayEvent e;
    e.kind = ReplayEvent::Kind::Answer;
    e.subject = string_field(j, "question_id", where);
    const auto a = answer_from_string(string_field(j, "answer", where));
    if (!a)
        script_error(where + "/answer", "answer must be yes, no or unknown");
    e.answer = *a;
    if (j.contains("overwrite"))
    {
        if (!j["overwrite"].is_boolean())
            script_error(where + "/overwrite", "overwrite must be a boolean");
        e.overwrite = j["overwrite"].get<bool>();
    }
    e.at_minutes = at_minutes(j, where);
    return e;
}

} // namespace

std::vector<ReplayEvent> parse_replay_script(std::string_view text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        script_error("", std::string("not valid JSON: ") + e.what());
    }
    std::vector<ReplayEvent> events;
    if (j.is_array())
    {
        for (std::size_t i = 0; i < j.size(); ++i)
            events.push_back(answer_event(j[i], "/" + std::to_string(i)));
    }
    else if (j.is_object())
    {
        known_keys(j, { "answers", "dismissals", "defects" }, "");
        auto list = [&](const char* key) -> const json* {
            if (!j.contains(key))
                return nullptr;
            if (!j[key].is_array())
                script_error(std::string("/") + key, std::string("'") + key + "' must be an array");
            return &j[key];
        };
        if (const json* a = list("answers"))
            for (std::size_t i = 0; i < a->size(); ++i)
                events.push_back(answer_event((*a)[i], "/answers/" + std::to_string(i)));
        if (const json* ds = list("dismissals"))
            for (std::size_t i = 0; i < ds->size(); ++i)
            {
                const json& d = (*ds)[i];
                const std::string where = "/dismissals/" + std::to_string(i);
                ReplayEvent e;
                e.kind = ReplayEvent::Kind::Dismiss;
                if (d.is_string())
                    e.subject = d.get<std::string>();
                else if (d.is_object())
                {
                    known_keys(d, { "site", "dismissed", "at_minutes" }, where);
                    e.subject = string_field(d, "site", where);
                    if (d.contains("dismissed"))
                    {
                        if (!d["dismissed"].is_boolean())
                            script_error(where + "/dismissed", "dismissed must be a boolean");
                        e.dismissed = d["dismissed"].get<bool>();
                    }
                    e.at_minutes = at_minutes(d, where);
                }
                else
                    script_error(where, "dismissal must be a site id or an object");
                events.push_back(std::move(e));
            }
        if (const json* ds = list("defects"))
            for (std::size_t i = 0; i < ds->size(); ++i)
            {
                const json& d = (*ds)[i];
                const std::string where = "/defects/" + std::to_string(i);
                if (!d.is_object())
                    script_error(where, "defect entry must be an object");
                known_keys(d, { "description", "site", "at_minutes" }, where);
                ReplayEvent e;
                e.kind = ReplayEvent::Kind::Defect;
                e.subject = string_field(d, "description", where);
                if (d.contains("site") && !d["site"].is_null())
                    e.site = string_field(d, "site", where);
                e.at_minutes = at_minutes(d, where);
                events.push_back(std::move(e));
            }
    }
    else
        script_error("", "answers file must be an array or an object");
    std::stable_sort(events.begin(), events.end(),
        [](const ReplayEvent& a, const ReplayEvent& b) { return a.at_minutes < b.at_minutes; });
    return events;
}

void replay(Session& s, const std::vector<ReplayEvent>& events, ManualClock& clock)
{
    s.set_clock(clock);
    for (const auto& e : events)
    {
        clock.set_minutes(e.at_minutes);
        switch (e.kind)
        {
        case ReplayEvent::Kind::Answer: s.submit_answer(e.subject, e.answer, e.overwrite); break;
        case ReplayEvent::Kind::Dismiss: s.dismiss(e.subject, e.dismissed); break;
        case ReplayEvent::Kind::Defect: s.log_defect(e.subject, e.site); break;
        }
    }
}

} // namespace errlens::session
