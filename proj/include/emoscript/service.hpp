#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "emoscript/error.hpp"
#include "emoscript/session.hpp"

namespace httplib {
class Server;
}

namespace emoscript {

// Read-only projection of a session for API clients.
nlohmann::json session_view(const Session& session);

nlohmann::json error_body(ErrorCode code, const std::string& message);
int http_status_for(ErrorCode code);

// Stream event lines for one completed turn: one "element" event per script
// element, then "turn_end", then "session_closed" if the turn closed the
// session.
std::vector<std::string> turn_events(const Turn& turn, const Session& session);

// HTTP API over a SessionRegistry. Routes:
//   POST /sessions                     create, optional {seed, turn_limit}
//   GET  /sessions/{id}                session view
//   POST /sessions/{id}/messages       {text} -> {turn, session}
//   GET  /sessions/{id}/transcript     completed turns, one JSON record per line
//   GET  /sessions/{id}/stream?from=N  line-delimited events, held open until the
//                                      session closes or the server stops
class ApiService {
public:
    ApiService(std::shared_ptr<const Engine> engine, SessionConfig defaults, std::uint64_t id_nonce);
    ~ApiService();

    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;

    void register_routes(httplib::Server& server);

    // Wakes every open stream so the server can shut down.
    void shutdown();

    SessionRegistry& registry() { return registry_; }

private:
    struct EventLog {
        std::mutex mutex;
        std::condition_variable cv;
        std::vector<std::string> lines;
        bool finished = false;
    };

    std::shared_ptr<EventLog> events_for(const std::string& id);
    void publish(const std::string& id, std::vector<std::string> lines, bool finished);

    SessionConfig defaults_;
    SessionRegistry registry_;
    std::mutex logs_mutex_;
    std::map<std::string, std::shared_ptr<EventLog>> logs_;
    std::atomic<bool> stopping_{false};
};

}  // namespace emoscript
