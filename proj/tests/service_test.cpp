#include "errlens/json_io.hpp"
#include "errlens/service.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <set>
#include <thread>

using namespace errlens;
using namespace errlens::service;
using nlohmann::json;
using testing_support::fixture;
using testing_support::scratch_dir;
using testing_support::slurp;

namespace fs = std::filesystem;

namespace {

struct Harness
{
    fs::path store;
    session::ManualClock clock;
    std::atomic<int> counter { 0 };
    SessionService svc;

    explicit Harness(const std::string& tag)
        : store(scratch_dir(tag))
        , svc(config())
    {}

    ServiceConfig config()
    {
        ServiceConfig c;
        c.store = store;
        c.clock = &clock;
        c.next_id = [this] { return "s" + std::to_string(++counter); };
        return c;
    }

    Response call(const std::string& method, const std::string& path, const json& body = nullptr,
        std::map<std::string, std::string> query = {})
    {
        return svc.handle({ method, path, std::move(query), body.is_null() ? "" : body.dump() });
    }

    /// Creates a session from uploaded fixture texts; returns its id.
    std::string create(const std::string& task = "jiong.task.json")
    {
        const auto r = call("POST", "/sessions",
            { { "program", slurp(fixture("jiong.mini")) }, { "task", slurp(fixture(task)) } });
        EXPECT_EQ(r.status, 201) << r.body;
        return json::parse(r.body)["payload"]["id"];
    }
};

json payload(const Response& r) { return json::parse(r.body).at("payload"); }
std::string error_code(const Response& r) { return json::parse(r.body).at("error").at("code"); }

} // namespace

TEST(Service, EndpointMap)
{
    EXPECT_EQ(endpoint_map().size(), 9u);
    std::set<std::string> seen;
    for (const auto& r : endpoint_map())
        seen.insert(r.method + " " + r.pattern);
    EXPECT_TRUE(seen.count("POST /sessions/{id}/answers"));
    EXPECT_TRUE(seen.count("GET /sessions/{id}/report"));
}

TEST(Service, CreateAndInspect)
{
    Harness h("svc_create");
    const auto id = h.create();
    EXPECT_TRUE(fs::exists(h.store / (id + ".json")));
    EXPECT_TRUE(fs::exists(h.store / id / "program.mini"));

    const auto sites = h.call("GET", "/sessions/" + id + "/sites");
    ASSERT_EQ(sites.status, 200);
    const auto list = payload(sites);
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(list[0]["status"], "flagged_probable");

    const auto src = h.call("GET", "/sessions/" + id + "/source");
    ASSERT_EQ(src.status, 200);
    EXPECT_EQ(payload(src)["text"], slurp(fixture("jiong.mini")));
    EXPECT_FALSE(payload(src)["highlights"].empty());

    EXPECT_EQ(h.call("GET", "/sessions/" + id).status, 200);
    EXPECT_TRUE(payload(h.call("GET", "/sessions/" + id + "/questions")).empty());
}

TEST(Service, CreateFromPathsAndEmbeddedJson)
{
    Harness h("svc_paths");
    auto r = h.call("POST", "/sessions",
        { { "program_path", fixture("jiong.mini").string() }, { "task_path", fixture("jiong.task.json").string() } });
    EXPECT_EQ(r.status, 201) << r.body;
    r = h.call("POST", "/sessions",
        { { "program", slurp(fixture("jiong.mini")) }, { "task", json::parse(slurp(fixture("jiong.task.json"))) } });
    EXPECT_EQ(r.status, 201) << r.body;
}

TEST(Service, ErrorStatuses)
{
    Harness h("svc_errors");
    EXPECT_EQ(h.call("GET", "/sessions/nope").status, 404);
    EXPECT_EQ(error_code(h.call("GET", "/sessions/nope/sites")), "unknown_session");
    EXPECT_EQ(h.call("GET", "/elsewhere").status, 404);
    EXPECT_EQ(h.svc.handle({ "POST", "/sessions", {}, "{ nope" }).status, 400);

    const auto bad = h.call("POST", "/sessions", { { "program", "func f( {" }, { "task", "{}" } });
    EXPECT_EQ(bad.status, 422);
    const auto err = json::parse(bad.body)["error"];
    EXPECT_EQ(err["code"], "validation");
    ASSERT_FALSE(err["diagnostics"].empty());
    EXPECT_EQ(err["diagnostics"][0]["line"], 1);
    EXPECT_EQ(h.call("POST", "/sessions", { { "program", "" } }).status, 422);
    EXPECT_EQ(h.call("POST", "/sessions", { { "program_path", "/nonexistent.mini" }, { "task", "{}" } }).status, 422);
    EXPECT_EQ(h.call("POST", "/sessions", { { "program", "" }, { "task", "{}" }, { "extra", 1 } }).status, 422);

    const auto id = h.create("jiong_undeclared.task.json");
    const std::string base = "/sessions/" + id;
    EXPECT_EQ(h.call("DELETE", base + "/sites").status, 405);
    EXPECT_EQ(error_code(h.call("POST", base + "/answers", { { "question_id", "S9.Q1" }, { "answer", "yes" } })),
        "unknown_question");
    EXPECT_EQ(h.call("POST", base + "/answers", { { "question_id", "S2.Q1" }, { "answer", "maybe" } }).status, 422);
    EXPECT_EQ(h.call("POST", base + "/answers", { { "question_id", "S2.Q1" }, { "answer", "no" } }).status, 200);
    const auto conflict = h.call("POST", base + "/answers", { { "question_id", "S2.Q1" }, { "answer", "yes" } });
    EXPECT_EQ(conflict.status, 409);
    EXPECT_EQ(error_code(conflict), "conflict");
    EXPECT_EQ(h.call("POST", base + "/answers",
                   { { "question_id", "S2.Q1" }, { "answer", "yes" }, { "overwrite", true } })
                  .status,
        200);
    EXPECT_EQ(error_code(h.call("POST", base + "/defects", { { "description", "x" }, { "site", "S8" } })),
        "unknown_site");
    EXPECT_EQ(h.call("POST", base + "/dismissals", { { "site", "S8" } }).status, 404);
    EXPECT_EQ(h.call("GET", base + "/report", nullptr, { { "format", "pdf" } }).status, 422);
}

TEST(Service, HashMismatchOnReload)
{
    Harness h("svc_hash");
    const auto id = h.create();
    testing_support::spit(h.store / id / "program.mini", "func f() { }\n");
    SessionService fresh(h.config());
    const auto r = fresh.handle({ "GET", "/sessions/" + id + "/sites", {}, "" });
    EXPECT_EQ(r.status, 409);
    EXPECT_NE(r.body.find("program.mini"), std::string::npos) << r.body;
}

// The API and the library produce the same state for the same actions.
TEST(Service, ParityWithDirectSession)
{
    Harness h("svc_parity");
    const auto id = h.create("jiong_undeclared.task.json");
    const std::string base = "/sessions/" + id;
    h.clock.set_minutes(1.5);
    const auto ans = h.call("POST", base + "/answers", { { "question_id", "S2.Q1" }, { "answer", "no" } });
    ASSERT_EQ(ans.status, 200);
    EXPECT_TRUE(payload(ans)["changed"]);
    EXPECT_TRUE(payload(ans)["pending_questions"].empty());
    h.clock.set_minutes(3);
    const auto def = h.call("POST", base + "/defects", { { "description", "missing blank line" }, { "site", "S2" } });
    ASSERT_EQ(def.status, 201);
    EXPECT_EQ(payload(def)["id"], "D1");
    EXPECT_EQ(payload(def)["targeted"], true);

    session::ManualClock clock;
    auto s = session::Session::start(
        session::Workspace::load(h.store / id / "program.mini", h.store / id / "task.json", "builtin"), id, clock);
    clock.set_minutes(1.5);
    s.submit_answer("S2.Q1", Answer::No);
    clock.set_minutes(3);
    s.log_defect("missing blank line", std::string("S2"));

    EXPECT_EQ(payload(h.call("GET", base + "/sites")), to_json(s.sites()));
    EXPECT_EQ(payload(ans)["sites"], to_json(s.sites()));

    // A second service instance sees the persisted session.
    SessionService fresh(h.config());
    const auto again = fresh.handle({ "GET", base + "/sites", {}, "" });
    EXPECT_EQ(payload(again), to_json(s.sites()));
}

TEST(Service, ReportMatchesStoredSession)
{
    Harness h("svc_report");
    const auto id = h.create();
    h.clock.set_minutes(3);
    h.call("POST", "/sessions/" + id + "/defects", { { "description", "h formula wrong" }, { "site", "S1" } });
    const auto text = h.call("GET", "/sessions/" + id + "/report", nullptr, { { "format", "text" } });
    ASSERT_EQ(text.status, 200);
    EXPECT_EQ(text.content_type.rfind("text/plain", 0), 0u);
    const auto loaded = session::Session::load(session::Session::file_for(h.store, id), h.clock);
    EXPECT_EQ(text.body, session::render(loaded.report(), session::ReportFormat::Text));

    const auto structured = h.call("GET", "/sessions/" + id + "/report");
    EXPECT_EQ(session::report_from_json(json::parse(structured.body)), loaded.report());
}

// Property: concurrent mutations of one session are linearized.
TEST(Service, ConcurrentPostsAreSerialized)
{
    Harness h("svc_concurrent");
    const auto id = h.create("jiong_undeclared.task.json");
    const std::string base = "/sessions/" + id;
    constexpr int n = 8;
    std::vector<std::thread> threads;
    std::atomic<int> changed { 0 }, conflicts { 0 }, defects { 0 };
    for (int i = 0; i < n; ++i)
        threads.emplace_back([&, i] {
            const auto r = h.call("POST", base + "/answers",
                { { "question_id", "S2.Q1" }, { "answer", i % 2 ? "yes" : "no" } });
            if (r.status == 409)
                ++conflicts;
            else if (r.status == 200 && payload(r)["changed"])
                ++changed;
            if (h.call("POST", base + "/defects", { { "description", "d" + std::to_string(i) } }).status == 201)
                ++defects;
        });
    for (auto& t : threads)
        t.join();
    EXPECT_EQ(changed, 1);
    EXPECT_EQ(defects, n);
    const auto state = payload(h.call("GET", base));
    EXPECT_EQ(state["transcript"].size(), 1u);
    std::set<std::string> ids;
    for (const auto& d : state["defects"])
        ids.insert(d["id"].get<std::string>());
    EXPECT_EQ(ids.size(), std::size_t(n));
    EXPECT_TRUE(ids.count("D8"));
    // The file on disk agrees with memory.
    const auto on_disk = json::parse(slurp(h.store / (id + ".json")));
    EXPECT_EQ(on_disk["defects"], state["defects"]);
}

TEST(Service, HttpRoundTrip)
{
    Harness h("svc_http");
    httplib::Server server;
    bind(server, h.svc);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const json body = { { "program", slurp(fixture("jiong.mini")) }, { "task", slurp(fixture("jiong.task.json")) } };
    const auto created = client.Post("/sessions", body.dump(), "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    const std::string id = json::parse(created->body)["payload"]["id"];
    const auto report = client.Get("/sessions/" + id + "/report?format=text");
    ASSERT_TRUE(report);
    EXPECT_EQ(report->status, 200);
    EXPECT_EQ(report->body, h.call("GET", "/sessions/" + id + "/report", nullptr, { { "format", "text" } }).body);
    const auto missing = client.Get("/sessions/zzz/sites");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);

    server.stop();
    t.join();
}

TEST(Service, ParseAddress)
{
    auto a = parse_address("0.0.0.0:9000");
    EXPECT_EQ(a.host, "0.0.0.0");
    EXPECT_EQ(a.port, 9000);
    a = parse_address(":81");
    EXPECT_EQ(a.host, "127.0.0.1");
    EXPECT_EQ(a.port, 81);
    EXPECT_EQ(parse_address("7").port, 7);
    EXPECT_THROW(parse_address("host:"), std::invalid_argument);
    EXPECT_THROW(parse_address("h:99999"), std::invalid_argument);
}
