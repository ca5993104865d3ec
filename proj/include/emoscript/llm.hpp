#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "emoscript/persona.hpp"

namespace emoscript {

struct SamplingParams {
    double temperature = 0.7;
    std::size_t max_output_units = 256;
    std::vector<std::string> stop;
    std::optional<std::uint64_t> seed;
};

// A chat-completion provider. Implementations throw Error(LLMUnavailable)
// for transport failures (retryable) and Error(LLMProtocolError) for
// malformed payloads (not retried). Must be safe to call from several
// sessions at once.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const Prompt& prompt, const SamplingParams& params) = 0;
};

struct RetryPolicy {
    int retries = 2;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::milliseconds deadline{120000};
};

struct Completion {
    // Completion with everything from the first human-tag line removed.
    std::string text;
    // Completion exactly as the backend returned it.
    std::string raw;
    int attempts = 0;
};

// Calls the backend, retrying transport failures with exponential backoff
// until `policy.retries` retries or the deadline are used up.
Completion llm_complete(const Prompt& prompt, const SamplingParams& params, LlmBackend& backend,
                        const RetryPolicy& policy, std::string_view human_tag);

// OpenAI-style /v1/chat/completions client: the prompt's system text becomes
// the system message and history turns alternate user/assistant.
class HttpChatBackend final : public LlmBackend {
public:
    HttpChatBackend(std::string endpoint, std::string model, std::chrono::milliseconds timeout);
    std::string complete(const Prompt& prompt, const SamplingParams& params) override;

    static std::string request_body(const Prompt& prompt, const SamplingParams& params,
                                    const std::string& model);
    static std::string parse_reply(const std::string& body);

private:
    std::string endpoint_;
    std::string model_;
    std::chrono::milliseconds timeout_;
};

// Test double returning queued replies in order. A queued failure throws
// Error(LLMUnavailable) for that call.
class ScriptedBackend final : public LlmBackend {
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<std::string> replies);

    void push_reply(std::string reply);
    void push_failure();
    // Reply used once the queue is exhausted; without one, an empty queue
    // is a transport failure.
    void set_fallback(std::string reply);

    std::string complete(const Prompt& prompt, const SamplingParams& params) override;

    std::size_t calls() const;
    std::vector<Prompt> prompts() const;
    std::vector<SamplingParams> params() const;

private:
    struct Item {
        bool failure = false;
        std::string reply;
    };

    mutable std::mutex mutex_;
    std::deque<Item> queue_;
    std::optional<std::string> fallback_;
    std::vector<Prompt> prompts_;
    std::vector<SamplingParams> params_;
};

// Offline backend: the reply is a pure function of the sampling seed, so a
// session replays identically whatever else runs concurrently.
class CannedBackend final : public LlmBackend {
public:
    explicit CannedBackend(std::vector<std::string> replies);
    static CannedBackend load(const std::filesystem::path& path);

    std::string complete(const Prompt& prompt, const SamplingParams& params) override;

private:
    std::vector<std::string> replies_;
};

}  // namespace emoscript
