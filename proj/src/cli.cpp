#include "errlens/cli.hpp"

#include "errlens/minilang/expression_form.hpp"
#include "errlens/service.hpp"
#include "errlens/session/session.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace errlens::cli {

using session::Session;
using session::SessionError;
namespace fs = std::filesystem;

Environment Environment::process()
{
    static const session::SystemClock clock;
    Environment env;
    env.in = &std::cin;
    env.out = &std::cout;
    env.err = &std::cerr;
    env.interactive = ::isatty(STDIN_FILENO) != 0;
    env.clock = &clock;
    env.next_id = session::generate_session_id;
    env.getenv = [](const char* name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name))
            return std::string(v);
        return std::nullopt;
    };
    return env;
}

namespace {

struct Options
{
    std::string program;
    std::string task;
    std::string catalog = std::string(session::builtin_catalog);
    std::string answers;
    std::string facts;
    std::string format = "text";
    bool timestamps = false;

    std::string catalog_path;

    std::string store;
    std::string addr;
    std::string id;
    std::string question;
    std::string answer;
    bool overwrite = false;
    std::string description;
    std::string site;
    bool restore = false;
};

class Runner
{
public:
    explicit Runner(Environment env)
        : m_env(std::move(env))
    {}

    std::ostream& out() { return *m_env.out; }
    std::ostream& err() { return *m_env.err; }

    std::string store(const Options& o) const
    {
        if (!o.store.empty())
            return o.store;
        if (auto v = m_env.getenv ? m_env.getenv("ERRLENS_STORE") : std::nullopt)
            return *v;
        return ".errlens";
    }

    std::string addr(const Options& o) const
    {
        if (!o.addr.empty())
            return o.addr;
        if (auto v = m_env.getenv ? m_env.getenv("ERRLENS_ADDR") : std::nullopt)
            return *v;
        return "127.0.0.1:8080";
    }

    std::optional<fs::path> optional_path(const std::string& s) const
    {
        if (s.empty())
            return std::nullopt;
        return fs::path(s);
    }

    int analyze(const Options& o)
    {
        const auto ws = session::Workspace::load(o.program, o.task, o.catalog, optional_path(o.facts));
        std::int64_t wall = 0;
        if (o.timestamps)
            wall = m_env.clock->wall_ms();
        session::ManualClock clock(wall);
        Session s = Session::start(ws, "analyze", clock);
        if (!o.answers.empty())
            session::replay(s, session::parse_replay_script(session::read_input(o.answers)), clock);
        out() << render(s.report(o.timestamps), *session::report_format_from_string(o.format));
        for (const auto& site : s.sites())
            if (is_flagged(site.status))
                return exit_flagged;
        return exit_ok;
    }

    int catalog_list(const Options& o)
    {
        const auto c = eps::parse_catalog(session::read_input(o.catalog_path));
        out() << "catalog " << c.name;
        if (!c.version.empty())
            out() << " " << c.version;
        out() << "\n";
        for (const auto& m : c.modes)
            out() << "mode " << m.id << ": " << m.name << "\n";
        for (const auto& s : c.scenarios)
            out() << "eps " << s.id << " (" << s.mode_id << ", " << eps::to_string(s.severity) << ")\n";
        return exit_ok;
    }

    int catalog_validate(const Options& o)
    {
        eps::parse_catalog(session::read_input(o.catalog_path));
        out() << "ok\n";
        return exit_ok;
    }

    Session load(const Options& o)
    {
        if (!session::valid_session_id(o.id))
            throw SessionError(session::SessionErrorCode::UnknownSession, "unknown session '" + o.id + "'");
        const auto file = Session::file_for(store(o), o.id);
        if (!fs::exists(file))
            throw SessionError(session::SessionErrorCode::UnknownSession, "unknown session '" + o.id + "'");
        return Session::load(file, *m_env.clock);
    }

    void print_sites(const Session& s)
    {
        for (const auto& site : s.sites())
            out() << site.id << " " << site.scenario_id << " " << to_string(site.status) << "\n";
    }

    int session_start(const Options& o)
    {
        const auto ws = session::Workspace::load(fs::absolute(o.program), fs::absolute(o.task),
            o.catalog == session::builtin_catalog ? o.catalog : fs::absolute(o.catalog).string(),
            o.facts.empty() ? std::nullopt : std::optional<fs::path>(fs::absolute(o.facts)));
        const std::string id = o.id.empty() ? m_env.next_id() : o.id;
        const auto file = Session::file_for(store(o), id);
        if (fs::exists(file))
            throw SessionError(session::SessionErrorCode::Conflict, "session '" + id + "' already exists");
        Session s = Session::start(ws, id, *m_env.clock);
        s.save(store(o));
        out() << s.id() << "\n";
        print_sites(s);
        return exit_ok;
    }

    int session_questions(const Options& o)
    {
        const Session s = load(o);
        for (const auto& q : s.pending_questions())
            out() << q.id << " " << q.text << "\n";
        return exit_ok;
    }

    int session_answer(const Options& o)
    {
        Session s = load(o);
        std::string value = o.answer;
        if (value.empty())
        {
            if (!m_env.interactive)
                throw SessionError(session::SessionErrorCode::InvalidArgument,
                    "no answer given for '" + o.question + "' (yes, no or unknown)");
            std::string text;
            for (const auto& site : s.sites())
                for (const auto& q : site.pending_questions)
                    if (q.id == o.question)
                        text = q.text;
            for (;;)
            {
                out() << o.question << " " << (text.empty() ? "" : text + " ") << "[yes/no/unknown]: " << std::flush;
                if (!std::getline(*m_env.in, value))
                    throw SessionError(session::SessionErrorCode::InvalidArgument, "no answer given");
                if (answer_from_string(value))
                    break;
                out() << "please answer yes, no or unknown\n";
            }
        }
        const auto answer = answer_from_string(value);
        if (!answer)
            throw SessionError(session::SessionErrorCode::InvalidArgument,
                "answer must be yes, no or unknown, not '" + value + "'");
        const auto r = s.submit_answer(o.question, *answer, o.overwrite);
        if (r.changed)
            s.save(store(o));
        print_sites(s);
        return exit_ok;
    }

    int session_defect(const Options& o)
    {
        Session s = load(o);
        const auto d = s.log_defect(o.description, o.site.empty() ? std::nullopt : std::optional<std::string>(o.site));
        s.save(store(o));
        out() << d.id << " +" << minilang::format_number(d.minutes_from_start) << " min "
              << (d.targeted ? "targeted" : "other") << "\n";
        return exit_ok;
    }

    int session_dismiss(const Options& o)
    {
        Session s = load(o);
        s.dismiss(o.site, !o.restore);
        s.save(store(o));
        print_sites(s);
        return exit_ok;
    }

    int session_report(const Options& o)
    {
        const Session s = load(o);
        out() << render(s.report(), *session::report_format_from_string(o.format));
        return exit_ok;
    }

    int serve(const Options& o)
    {
        const auto address = service::parse_address(addr(o));
        service::ServiceConfig cfg;
        cfg.store = store(o);
        cfg.clock = m_env.clock;
        cfg.next_id = m_env.next_id;
        service::SessionService svc(cfg);
        const bool ok = service::serve(address, svc, [&](int port) {
            out() << "listening on " << address.host << ":" << port << " store " << svc.config().store.string()
                  << "\n"
                  << std::flush;
        });
        if (!ok)
        {
            err() << "error: cannot bind " << address.host << ":" << address.port << "\n";
            return exit_error;
        }
        return exit_ok;
    }

private:
    Environment m_env;
};

} // namespace

int run(int argc, const char* const* argv, Environment env)
{
    Options o;
    CLI::App app { "Targeted code inspection driven by error-prone scenarios", "errlens" };
    app.require_subcommand(1);
    const std::vector<std::string> formats { "text", "structured" };

    auto* analyze = app.add_subcommand("analyze", "Match the catalog against a program and print a report");
    analyze->add_option("program", o.program, "MiniLang program")->required();
    analyze->add_option("--task", o.task, "Task document")->required();
    analyze->add_option("--catalog", o.catalog, "Scenario catalog (builtin for the shipped one)");
    analyze->add_option("--answers", o.answers, "Answers file replayed before reporting");
    analyze->add_option("--facts", o.facts, "Extra facts document");
    analyze->add_option("--format", o.format, "text or structured")->check(CLI::IsMember(formats));
    analyze->add_flag("--timestamps", o.timestamps, "Include the session start time");

    auto* catalog = app.add_subcommand("catalog", "Catalog tooling");
    catalog->require_subcommand(1);
    auto* cat_list = catalog->add_subcommand("list", "List modes and scenarios");
    cat_list->add_option("path", o.catalog_path)->required();
    auto* cat_validate = catalog->add_subcommand("validate", "Validate a catalog");
    cat_validate->add_option("path", o.catalog_path)->required();

    auto* sess = app.add_subcommand("session", "Inspection sessions");
    sess->require_subcommand(1);
    auto* s_start = sess->add_subcommand("start", "Start a session");
    s_start->add_option("program", o.program)->required();
    s_start->add_option("--task", o.task)->required();
    s_start->add_option("--catalog", o.catalog);
    s_start->add_option("--facts", o.facts);
    s_start->add_option("--id", o.id, "Session id (random when omitted)");
    auto* s_questions = sess->add_subcommand("questions", "List pending questions");
    s_questions->add_option("session", o.id)->required();
    auto* s_answer = sess->add_subcommand("answer", "Answer a question");
    s_answer->add_option("session", o.id)->required();
    s_answer->add_option("question", o.question)->required();
    s_answer->add_option("answer", o.answer, "yes, no or unknown; prompted when omitted");
    s_answer->add_flag("--overwrite", o.overwrite, "Replace a recorded answer");
    auto* s_defect = sess->add_subcommand("defect", "Log a defect");
    s_defect->add_option("session", o.id)->required();
    s_defect->add_option("description", o.description)->required();
    s_defect->add_option("--site", o.site, "Site the defect was found at");
    auto* s_dismiss = sess->add_subcommand("dismiss", "Dismiss a site");
    s_dismiss->add_option("session", o.id)->required();
    s_dismiss->add_option("site", o.site)->required();
    s_dismiss->add_flag("--restore", o.restore, "Undo a dismissal");
    auto* s_report = sess->add_subcommand("report", "Print the session report");
    s_report->add_option("session", o.id)->required();
    s_report->add_option("--format", o.format)->check(CLI::IsMember(formats));
    for (auto* sub : { s_start, s_questions, s_answer, s_defect, s_dismiss, s_report })
        sub->add_option("--store", o.store, "Session store directory");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    serve->add_option("--addr", o.addr, "host:port");
    serve->add_option("--store", o.store, "Session store directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, *env.out, *env.err);
        return code == 0 ? exit_ok : exit_error;
    }

    Runner r(env);
    try
    {
        if (*analyze)
            return r.analyze(o);
        if (*cat_list)
            return r.catalog_list(o);
        if (*cat_validate)
            return r.catalog_validate(o);
        if (*s_start)
            return r.session_start(o);
        if (*s_questions)
            return r.session_questions(o);
        if (*s_answer)
            return r.session_answer(o);
        if (*s_defect)
            return r.session_defect(o);
        if (*s_dismiss)
            return r.session_dismiss(o);
        if (*s_report)
            return r.session_report(o);
        if (*serve)
            return r.serve(o);
    }
    catch (const InputError& e)
    {
        for (const auto& d : e.diagnostics())
            *env.err << to_string(d) << "\n";
        return exit_error;
    }
    catch (const SessionError& e)
    {
        *env.err << "error: " << e.what() << "\n";
        return exit_error;
    }
    catch (const std::exception& e)
    {
        *env.err << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}

} // namespace errlens::cli
