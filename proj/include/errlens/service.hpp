#pragma once

#include "errlens/session/session.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace errlens::service {

struct Request
{
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response
{
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct Route
{
    std::string method;
    std::string pattern;
    std::string summary;
};

/// The documented route table.
const std::vector<Route>& endpoint_map();

struct ServiceConfig
{
    std::filesystem::path store;
    /// Defaults to the system clock.
    const session::Clock* clock = nullptr;
    /// Defaults to generate_session_id.
    std::function<std::string()> next_id;
};

/// Session store plus request dispatch. Mutations on one session are
/// serialized by a per-session lock; distinct sessions proceed in parallel.
class SessionService
{
public:
    explicit SessionService(ServiceConfig cfg);

    Response handle(const Request& req);

    const ServiceConfig& config() const { return m_cfg; }

private:
    struct Entry
    {
        std::mutex mutex;
        std::optional<session::Session> session;
    };

    std::shared_ptr<Entry> entry(const std::string& id);
    /// Locks the entry, loading the session from the store on first use.
    template <typename F>
    Response with_session(const std::string& id, F&& f);

    Response create(const Request& req);

    ServiceConfig m_cfg;
    std::mutex m_map_mutex;
    std::map<std::string, std::shared_ptr<Entry>> m_entries;
};

/// Envelope helpers.
std::string ok_body(const nlohmann::json& payload);
std::string error_body(const std::string& code, const std::string& message,
    const nlohmann::json& diagnostics = nullptr);

/// Routes every request through `svc.handle`.
void bind(httplib::Server& server, SessionService& svc);

struct Address
{
    std::string host = "127.0.0.1";
    int port = 8080;
};

/// Parses host:port, :port or a bare port. Throws std::invalid_argument.
Address parse_address(const std::string& text);

/// Blocks until the server stops. Returns false when binding fails.
/// `on_ready` receives the bound port (useful with port 0).
bool serve(const Address& addr, SessionService& svc, const std::function<void(int)>& on_ready = {});

} // namespace errlens::service
