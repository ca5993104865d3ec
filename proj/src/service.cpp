#include "emoscript/service.hpp"

#include <chrono>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "emoscript/error.hpp"
#include "emoscript/transcript.hpp"
#include "emoscript/unicode.hpp"

namespace emoscript {

using nlohmann::json;

json session_view(const Session& session) {
    const auto turns = session.turns();
    json view = {
        {"id", session.id()},
        {"state", to_string(session.state())},
        {"turn_count", turns.size()},
        {"turn_limit", session.config().turn_limit},
        {"last_script", nullptr},
    };
    if (!turns.empty()) view["last_script"] = script_to_json(turns.back().script);
    return view;
}

json error_body(ErrorCode code, const std::string& message) {
    return {{"error", {{"code", to_string(code)}, {"message", message}}}};
}

int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::SessionClosed:
        case ErrorCode::SessionBusy: return 409;
        case ErrorCode::SessionNotFound: return 404;
        case ErrorCode::EmptyInput:
        case ErrorCode::InvalidInput:
        case ErrorCode::ConfigError:
        case ErrorCode::ParseError:
        case ErrorCode::ValidationError: return 400;
        case ErrorCode::BudgetImpossible: return 422;
        case ErrorCode::LLMUnavailable: return 503;
        case ErrorCode::LLMProtocolError: return 502;
        default: return 500;
    }
}

std::vector<std::string> turn_events(const Turn& turn, const Session& session) {
    std::vector<std::string> lines;
    const auto elements = script_to_json(turn.script);
    for (std::size_t i = 0; i < elements.size(); ++i) {
        lines.push_back(json{{"type", "element"},
                             {"session_id", turn.session_id},
                             {"turn", turn.index},
                             {"seq", i},
                             {"element", elements[i]}}
                            .dump());
    }
    const auto state = turn.index >= session.config().turn_limit ? SessionState::closed : session.state();
    lines.push_back(json{{"type", "turn_end"},
                         {"session_id", turn.session_id},
                         {"turn", turn.index},
                         {"turn_count", turn.index},
                         {"turn_limit", session.config().turn_limit},
                         {"state", to_string(state)}}
                        .dump());
    if (state == SessionState::closed) {
        lines.push_back(
            json{{"type", "session_closed"}, {"session_id", turn.session_id}, {"turn_count", turn.index}}.dump());
    }
    return lines;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
    send_json(res, http_status_for(e.code()), error_body(e.code(), e.what()));
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    if (!unicode::is_valid_utf8(req.body)) throw Error(ErrorCode::InvalidInput, "request body is not valid UTF-8");
    try {
        auto body = json::parse(req.body);
        if (!body.is_object()) throw Error(ErrorCode::InvalidInput, "request body must be a JSON object");
        return body;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidInput, std::string("request body is not JSON: ") + e.what());
    }
}

}  // namespace

ApiService::ApiService(std::shared_ptr<const Engine> engine, SessionConfig defaults, std::uint64_t id_nonce)
    : defaults_(std::move(defaults)), registry_(std::move(engine), id_nonce) {
    defaults_.validate();
}

ApiService::~ApiService() { shutdown(); }

void ApiService::shutdown() {
    stopping_ = true;
    std::lock_guard lock(logs_mutex_);
    for (auto& [_, log] : logs_) {
        std::lock_guard log_lock(log->mutex);
        log->cv.notify_all();
    }
}

std::shared_ptr<ApiService::EventLog> ApiService::events_for(const std::string& id) {
    std::lock_guard lock(logs_mutex_);
    auto& log = logs_[id];
    if (!log) log = std::make_shared<EventLog>();
    return log;
}

void ApiService::publish(const std::string& id, std::vector<std::string> lines, bool finished) {
    auto log = events_for(id);
    std::lock_guard lock(log->mutex);
    for (auto& line : lines) log->lines.push_back(std::move(line));
    log->finished = log->finished || finished;
    log->cv.notify_all();
}

void ApiService::register_routes(httplib::Server& server) {
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto body = parse_body(req);
            SessionConfig config = defaults_;
            if (body.contains("seed")) {
                if (!body["seed"].is_number_unsigned()) throw Error(ErrorCode::InvalidInput, "seed must be an unsigned integer");
                config.seed = body["seed"].get<std::uint64_t>();
            }
            if (body.contains("turn_limit")) {
                if (!body["turn_limit"].is_number_unsigned()) {
                    throw Error(ErrorCode::ConfigError, "turn_limit must be an unsigned integer");
                }
                config.turn_limit = body["turn_limit"].get<std::size_t>();
            }
            config.validate();
            auto session = registry_.create(config);
            events_for(session->id());
            send_json(res, 201, session_view(*session));
        } catch (const Error& e) {
            send_error(res, e);
        }
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            send_json(res, 200, session_view(*registry_.get(req.matches[1])));
        } catch (const Error& e) {
            send_error(res, e);
        }
    });

    server.Post(R"(/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            auto session = registry_.get(req.matches[1]);
            const auto body = parse_body(req);
            if (!body.contains("text") || !body["text"].is_string()) {
                throw Error(ErrorCode::InvalidInput, "body must contain a string field 'text'");
            }
            const auto turn = session->step(body["text"].get<std::string>());
            publish(session->id(), turn_events(turn, *session), session->state() == SessionState::closed);
            send_json(res, 200, {{"turn", turn_to_json(turn)}, {"session", session_view(*session)}});
        } catch (const Error& e) {
            send_error(res, e);
        }
    });

    server.Get(R"(/sessions/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            auto session = registry_.get(req.matches[1]);
            std::string body;
            for (const auto& turn : session->turns()) body += turn_to_line(turn) + "\n";
            res.status = 200;
            res.set_content(body, "application/x-ndjson");
        } catch (const Error& e) {
            send_error(res, e);
        }
    });

    server.Get(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            auto session = registry_.get(req.matches[1]);
            auto log = events_for(session->id());
            auto cursor = std::make_shared<std::size_t>(0);
            if (req.has_param("from")) {
                try {
                    *cursor = std::stoul(req.get_param_value("from"));
                } catch (const std::exception&) {
                    throw Error(ErrorCode::InvalidInput, "'from' must be a non-negative integer");
                }
            }
            res.set_chunked_content_provider(
                "application/x-ndjson", [this, log, cursor](std::size_t, httplib::DataSink& sink) {
                    std::unique_lock lock(log->mutex);
                    log->cv.wait_for(lock, std::chrono::milliseconds(250), [&] {
                        return *cursor < log->lines.size() || log->finished || stopping_;
                    });
                    std::string chunk;
                    while (*cursor < log->lines.size()) chunk += log->lines[(*cursor)++] + "\n";
                    const bool done = (log->finished && *cursor >= log->lines.size()) || stopping_;
                    lock.unlock();
                    if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
                    if (done) sink.done();
                    return true;
                });
        } catch (const Error& e) {
            send_error(res, e);
        }
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            spdlog::error("unhandled API error: {}", e.what());
            send_json(res, 500, error_body(ErrorCode::Internal, e.what()));
        }
    });
}

}  // namespace emoscript
