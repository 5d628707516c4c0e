#include "errlens/service.hpp"

#include "errlens/json_io.hpp"

#include <httplib.h>

#include <charconv>
#include <fstream>

namespace errlens::service {

using nlohmann::json;
using session::Session;
using session::SessionError;
using session::SessionErrorCode;
namespace fs = std::filesystem;

const std::vector<Route>& endpoint_map()
{
    static const std::vector<Route> routes = {
        { "POST", "/sessions", "create a session from uploaded program, task and catalog" },
        { "GET", "/sessions/{id}", "persisted session state" },
        { "GET", "/sessions/{id}/sites", "ranked sites" },
        { "GET", "/sessions/{id}/questions", "pending questions" },
        { "POST", "/sessions/{id}/answers", "answer a question: {question_id, answer, overwrite?}" },
        { "POST", "/sessions/{id}/dismissals", "dismiss or restore a site: {site, dismissed?}" },
        { "POST", "/sessions/{id}/defects", "log a defect: {description, site?}" },
        { "GET", "/sessions/{id}/report", "report document, ?format=text|structured" },
        { "GET", "/sessions/{id}/source", "program text with evidence spans" },
    };
    return routes;
}

std::string ok_body(const json& payload) { return json { { "status", "ok" }, { "payload", payload } }.dump(); }

std::string error_body(const std::string& code, const std::string& message, const json& diagnostics)
{
    json err { { "code", code }, { "message", message } };
    if (!diagnostics.is_null())
        err["diagnostics"] = diagnostics;
    return json { { "status", "error" }, { "error", err } }.dump();
}

namespace {

Response ok(const json& payload, int status = 200) { return { status, "application/json", ok_body(payload) }; }

Response fail(int status, const std::string& code, const std::string& message, const json& diagnostics = nullptr)
{
    return { status, "application/json", error_body(code, message, diagnostics) };
}

int status_for(SessionErrorCode c)
{
    switch (c)
    {
    case SessionErrorCode::UnknownSession:
    case SessionErrorCode::UnknownQuestion:
    case SessionErrorCode::UnknownSite: return 404;
    case SessionErrorCode::Conflict:
    case SessionErrorCode::VersionMismatch:
    case SessionErrorCode::HashMismatch:
    case SessionErrorCode::StateMismatch: return 409;
    case SessionErrorCode::InvalidArgument: return 422;
    case SessionErrorCode::Io:
    case SessionErrorCode::Corrupt: return 500;
    }
    return 500;
}

json diagnostics_json(const std::vector<Diagnostic>& ds)
{
    json arr = json::array();
    for (const auto& d : ds)
        arr.push_back({ { "severity", d.severity == Severity::Error ? "error" : "warning" }, { "code", d.code },
            { "message", d.message }, { "line", d.line }, { "column", d.column }, { "element", d.element } });
    return arr;
}

struct BadRequest
{
    int status;
    std::string code;
    std::string message;
};

json parse_body(const std::string& body)
{
    json j;
    try
    {
        j = json::parse(body);
    }
    catch (const json::parse_error& e)
    {
        throw BadRequest { 400, "bad_json", std::string("request body is not valid JSON: ") + e.what() };
    }
    if (!j.is_object())
        throw BadRequest { 400, "bad_json", "request body must be a JSON object" };
    return j;
}

std::string required_string(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_string())
        throw BadRequest { 422, "validation", std::string("'") + key + "' must be a string" };
    return j[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key)
{
    if (!j.contains(key) || j[key].is_null())
        return std::nullopt;
    return required_string(j, key);
}

bool optional_bool(const json& j, const char* key, bool fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_boolean())
        throw BadRequest { 422, "validation", std::string("'") + key + "' must be a boolean" };
    return j[key].get<bool>();
}

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size())
    {
        const auto j = path.find('/', i);
        const auto end = j == std::string::npos ? path.size() : j;
        if (end > i)
            parts.push_back(path.substr(i, end - i));
        i = end + 1;
    }
    return parts;
}

json questions_json(const std::vector<Question>& qs)
{
    json arr = json::array();
    for (const auto& q : qs)
        arr.push_back(to_json(q));
    return arr;
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush())
        throw SessionError(SessionErrorCode::Io, "cannot write '" + p.string() + "'");
}

} // namespace

SessionService::SessionService(ServiceConfig cfg)
    : m_cfg(std::move(cfg))
{
    static const session::SystemClock system_clock;
    if (!m_cfg.clock)
        m_cfg.clock = &system_clock;
    if (!m_cfg.next_id)
        m_cfg.next_id = session::generate_session_id;
    std::error_code ec;
    fs::create_directories(m_cfg.store, ec);
    m_cfg.store = fs::absolute(m_cfg.store);
}

std::shared_ptr<SessionService::Entry> SessionService::entry(const std::string& id)
{
    std::lock_guard lock(m_map_mutex);
    auto& e = m_entries[id];
    if (!e)
        e = std::make_shared<Entry>();
    return e;
}

template <typename F>
Response SessionService::with_session(const std::string& id, F&& f)
{
    if (!session::valid_session_id(id))
        return fail(404, "unknown_session", "unknown session '" + id + "'");
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    if (!e->session)
    {
        const auto file = Session::file_for(m_cfg.store, id);
        if (!fs::exists(file))
            return fail(404, "unknown_session", "unknown session '" + id + "'");
        e->session = Session::load(file, *m_cfg.clock);
    }
    return f(*e->session);
}

Response SessionService::create(const Request& req)
{
    const json body = parse_body(req.body);
    for (const auto& [k, v] : body.items())
        if (k != "program" && k != "task" && k != "catalog" && k != "facts" && k != "program_path" && k != "task_path"
            && k != "catalog_path" && k != "facts_path")
            throw BadRequest { 422, "validation", "unknown field '" + k + "'" };

    const std::string id = m_cfg.next_id();
    if (!session::valid_session_id(id))
        return fail(500, "internal", "generated session id is invalid");
    const fs::path dir = m_cfg.store / id;

    // Uploaded texts are kept next to the session file so a restarted
    // service can verify and re-read them.
    auto place = [&](const char* text_key, const char* path_key, const char* file_name) -> std::optional<fs::path> {
        // task and facts documents may also be embedded as JSON.
        std::optional<std::string> text;
        if (body.contains(text_key) && body[text_key].is_object())
            text = body[text_key].dump(2) + "\n";
        else
            text = optional_string(body, text_key);
        if (text)
        {
            fs::create_directories(dir);
            write_file(dir / file_name, *text);
            return dir / file_name;
        }
        if (auto path = optional_string(body, path_key))
            return fs::path(*path);
        return std::nullopt;
    };
    try
    {
        const auto program = place("program", "program_path", "program.mini");
        const auto task = place("task", "task_path", "task.json");
        if (!program || !task)
            throw BadRequest { 422, "validation", "'program' and 'task' are required" };
        const auto catalog = place("catalog", "catalog_path", "catalog.eps");
        const auto facts = place("facts", "facts_path", "facts.json");
        std::shared_ptr<const session::Workspace> ws;
        try
        {
            ws = session::Workspace::load(*program, *task,
                catalog ? catalog->string() : std::string(session::builtin_catalog), facts);
        }
        catch (const session::SessionError& e)
        {
            // A path the client named is unreadable: their input, not our store.
            if (e.code() != session::SessionErrorCode::Io)
                throw;
            throw BadRequest { 422, "validation", e.what() };
        }
        auto e = entry(id);
        std::lock_guard lock(e->mutex);
        e->session = Session::start(ws, id, *m_cfg.clock);
        e->session->save(m_cfg.store);
        return ok(e->session->to_json(), 201);
    }
    catch (...)
    {
        std::error_code ec;
        fs::remove_all(dir, ec);
        throw;
    }
}

Response SessionService::handle(const Request& req)
{
    try
    {
        const auto parts = split_path(req.path);
        if (parts.empty() || parts[0] != "sessions" || parts.size() > 3)
            return fail(404, "not_found", "no route for " + req.path);
        const auto method_not_allowed = [&] {
            return fail(405, "method_not_allowed", req.method + " is not supported on " + req.path);
        };
        if (parts.size() == 1)
            return req.method == "POST" ? create(req) : method_not_allowed();

        const std::string& id = parts[1];
        const std::string what = parts.size() == 3 ? parts[2] : "";
        const bool get = req.method == "GET";
        const bool post = req.method == "POST";

        if (what.empty())
            return get ? with_session(id, [](Session& s) { return ok(s.to_json()); }) : method_not_allowed();
        if (what == "sites")
            return get ? with_session(id, [](Session& s) { return ok(to_json(s.sites())); }) : method_not_allowed();
        if (what == "questions")
            return get ? with_session(id, [](Session& s) { return ok(questions_json(s.pending_questions())); })
                       : method_not_allowed();
        if (what == "report")
        {
            if (!get)
                return method_not_allowed();
            const auto it = req.query.find("format");
            const auto fmt = session::report_format_from_string(it == req.query.end() ? "structured" : it->second);
            if (!fmt)
                return fail(422, "validation", "format must be text or structured");
            return with_session(id, [&](Session& s) {
                return Response { 200, *fmt == session::ReportFormat::Text ? "text/plain; charset=utf-8" : "application/json",
                    session::render(s.report(), *fmt) };
            });
        }
        if (what == "source")
        {
            if (!get)
                return method_not_allowed();
            return with_session(id, [](Session& s) {
                json highlights = json::array();
                for (const auto& site : s.sites())
                    for (const auto& f : site.evidence)
                        for (const auto& sp : f.evidence)
                            highlights.push_back({ { "site", site.id }, { "status", to_string(site.status) },
                                { "fact", f.render() }, { "span", to_json(sp) } });
                const auto& inputs = s.workspace().inputs();
                return ok({ { "path", inputs.front().path }, { "text", s.workspace().program_text() },
                    { "highlights", highlights } });
            });
        }
        if (what == "answers")
        {
            if (!post)
                return method_not_allowed();
            const json body = parse_body(req.body);
            const std::string qid = required_string(body, "question_id");
            const auto answer = answer_from_string(required_string(body, "answer"));
            if (!answer)
                return fail(422, "validation", "answer must be yes, no or unknown");
            const bool overwrite = optional_bool(body, "overwrite", false);
            return with_session(id, [&](Session& s) {
                const auto r = s.submit_answer(qid, *answer, overwrite);
                if (r.changed)
                    s.save(m_cfg.store);
                return ok({ { "changed", r.changed }, { "sites", to_json(r.sites) },
                    { "pending_questions", questions_json(s.pending_questions()) } });
            });
        }
        if (what == "dismissals")
        {
            if (!post)
                return method_not_allowed();
            const json body = parse_body(req.body);
            const std::string site = required_string(body, "site");
            const bool dismissed = optional_bool(body, "dismissed", true);
            return with_session(id, [&](Session& s) {
                s.dismiss(site, dismissed);
                s.save(m_cfg.store);
                return ok({ { "sites", to_json(s.sites()) } });
            });
        }
        if (what == "defects")
        {
            if (!post)
                return method_not_allowed();
            const json body = parse_body(req.body);
            const std::string description = required_string(body, "description");
            const auto site = optional_string(body, "site");
            return with_session(id, [&](Session& s) {
                const auto d = s.log_defect(description, site);
                s.save(m_cfg.store);
                return ok(to_json(d), 201);
            });
        }
        return fail(404, "not_found", "no route for " + req.path);
    }
    catch (const BadRequest& e)
    {
        return fail(e.status, e.code, e.message);
    }
    catch (const InputError& e)
    {
        return fail(422, "validation", e.what(), diagnostics_json(e.diagnostics()));
    }
    catch (const SessionError& e)
    {
        return fail(status_for(e.code()), session::to_string(e.code()), e.what());
    }
    catch (const std::exception& e)
    {
        return fail(500, "internal", e.what());
    }
}

void bind(httplib::Server& server, SessionService& svc)
{
    auto dispatch = [&svc](const httplib::Request& hreq, httplib::Response& hres) {
        Request req;
        req.method = hreq.method;
        req.path = hreq.path;
        for (const auto& [k, v] : hreq.params)
            req.query.emplace(k, v);
        req.body = hreq.body;
        const Response r = svc.handle(req);
        hres.status = r.status;
        hres.set_content(r.body, r.content_type);
    };
    server.Get(R"(/.*)", dispatch);
    server.Post(R"(/.*)", dispatch);
    server.Put(R"(/.*)", dispatch);
    server.Delete(R"(/.*)", dispatch);
    server.Patch(R"(/.*)", dispatch);
}

Address parse_address(const std::string& text)
{
    Address a;
    std::string port = text;
    const auto colon = text.rfind(':');
    if (colon != std::string::npos)
    {
        if (colon > 0)
            a.host = text.substr(0, colon);
        port = text.substr(colon + 1);
    }
    int p = -1;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
    if (ec != std::errc() || ptr != port.data() + port.size() || p < 0 || p > 65535 || a.host.empty())
        throw std::invalid_argument("bad address '" + text + "' (expected host:port)");
    a.port = p;
    return a;
}

bool serve(const Address& addr, SessionService& svc, const std::function<void(int)>& on_ready)
{
    httplib::Server server;
    bind(server, svc);
    int port = addr.port;
    if (port == 0)
    {
        port = server.bind_to_any_port(addr.host);
        if (port < 0)
            return false;
    }
    else if (!server.bind_to_port(addr.host, port))
        return false;
    if (on_ready)
        on_ready(port);
    return server.listen_after_bind();
}

} // namespace errlens::service
