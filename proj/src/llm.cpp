#include "emoscript/llm.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "emoscript/error.hpp"
#include "http_endpoint.hpp"

namespace emoscript {

using nlohmann::json;

Completion llm_complete(const Prompt& prompt, const SamplingParams& params, LlmBackend& backend,
                        const RetryPolicy& policy, std::string_view human_tag) {
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    auto backoff = policy.initial_backoff;
    std::string last_error;

    for (int attempt = 1;; ++attempt) {
        try {
            Completion completion;
            completion.raw = backend.complete(prompt, params);
            completion.attempts = attempt;
            auto cut = cut_at_human_turn(completion.raw, human_tag);
            completion.text = cut ? std::move(*cut) : completion.raw;
            return completion;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::LLMUnavailable) throw;
            last_error = e.what();
            const bool retries_left = attempt <= policy.retries;
            const bool time_left = clock::now() - started + backoff < policy.deadline;
            if (!retries_left || !time_left) {
                throw Error(ErrorCode::LLMUnavailable, "LLM unavailable after " + std::to_string(attempt) +
                                                           " attempt(s): " + last_error);
            }
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

// ---------------------------------------------------------------------------

HttpChatBackend::HttpChatBackend(std::string endpoint, std::string model, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_(timeout) {
    detail::parse_endpoint(endpoint_, "/v1/chat/completions");
}

std::string HttpChatBackend::request_body(const Prompt& prompt, const SamplingParams& params,
                                          const std::string& model) {
    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", prompt.system}});
    for (const auto& turn : prompt.history) {
        messages.push_back(
            {{"role", turn.speaker == Speaker::human ? "user" : "assistant"}, {"content", turn.text}});
    }
    json body = {
        {"model", model},
        {"messages", std::move(messages)},
        {"temperature", params.temperature},
        {"max_tokens", params.max_output_units},
        {"stop", params.stop},
    };
    if (params.seed) body["seed"] = *params.seed;
    return body.dump();
}

std::string HttpChatBackend::parse_reply(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error&) {
        throw Error(ErrorCode::LLMProtocolError, "completion reply is not JSON");
    }
    try {
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw Error(ErrorCode::LLMProtocolError, "completion content is not a string");
        return content.get<std::string>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::LLMProtocolError, "completion reply lacks choices[0].message.content");
    }
}

std::string HttpChatBackend::complete(const Prompt& prompt, const SamplingParams& params) {
    const auto target = detail::parse_endpoint(endpoint_, "/v1/chat/completions");
    httplib::Client client(target.origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    auto result = client.Post(target.path, request_body(prompt, params, model_), "application/json");
    if (!result) {
        throw Error(ErrorCode::LLMUnavailable, "LLM endpoint unreachable: " + httplib::to_string(result.error()));
    }
    if (result->status >= 500 || result->status == 429 || result->status == 408) {
        throw Error(ErrorCode::LLMUnavailable, "LLM endpoint returned HTTP " + std::to_string(result->status));
    }
    if (result->status != 200) {
        throw Error(ErrorCode::LLMProtocolError, "LLM endpoint returned HTTP " + std::to_string(result->status));
    }
    return parse_reply(result->body);
}

// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies) {
    for (auto& reply : replies) queue_.push_back({false, std::move(reply)});
}

void ScriptedBackend::push_reply(std::string reply) {
    std::lock_guard lock(mutex_);
    queue_.push_back({false, std::move(reply)});
}

void ScriptedBackend::push_failure() {
    std::lock_guard lock(mutex_);
    queue_.push_back({true, {}});
}

void ScriptedBackend::set_fallback(std::string reply) {
    std::lock_guard lock(mutex_);
    fallback_ = std::move(reply);
}

std::string ScriptedBackend::complete(const Prompt& prompt, const SamplingParams& params) {
    std::lock_guard lock(mutex_);
    prompts_.push_back(prompt);
    params_.push_back(params);
    if (queue_.empty()) {
        if (fallback_) return *fallback_;
        throw Error(ErrorCode::LLMUnavailable, "scripted backend has no reply queued");
    }
    auto item = std::move(queue_.front());
    queue_.pop_front();
    if (item.failure) throw Error(ErrorCode::LLMUnavailable, "scripted transport failure");
    return item.reply;
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return prompts_.size();
}

std::vector<Prompt> ScriptedBackend::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

std::vector<SamplingParams> ScriptedBackend::params() const {
    std::lock_guard lock(mutex_);
    return params_;
}

// ---------------------------------------------------------------------------

CannedBackend::CannedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {
    if (replies_.empty()) throw Error(ErrorCode::ConfigError, "canned backend needs at least one reply");
}

CannedBackend CannedBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open canned replies: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        const auto doc = json::parse(buf.str());
        return CannedBackend(doc.at("replies").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("canned replies: ") + e.what());
    }
}

std::string CannedBackend::complete(const Prompt&, const SamplingParams& params) {
    const std::uint64_t seed = params.seed.value_or(0);
    return replies_[static_cast<std::size_t>(seed % replies_.size())];
}

}  // namespace emoscript
