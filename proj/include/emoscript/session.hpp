#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emoscript/behavior.hpp"
#include "emoscript/llm.hpp"
#include "emoscript/persona.hpp"
#include "emoscript/taxonomy.hpp"

namespace emoscript {

struct Turn {
    std::string session_id;
    std::size_t index = 0;
    std::string human_text;
    std::string llm_raw;
    GuardReport guard;
    BehaviorScript script;
    std::uint64_t seed_used = 0;
    std::string t_request;
    std::string t_response;
    std::optional<ErrorAnnotation> error_annotation;
    // Set when the classifier failed and every sentence fell back to the
    // default genre.
    bool classifier_fallback = false;
    // Repeat-guard regenerations performed for this turn (0 or 1).
    int regenerations = 0;

    std::vector<EmotionPrediction> emotion_trace() const { return script.emotion_trace(); }
};

inline constexpr std::size_t kDefaultTurnLimit = 11;

struct SessionConfig {
    std::size_t turn_limit = kDefaultTurnLimit;
    std::uint64_t seed = 0;
    SamplingParams sampling;
    RetryPolicy retry;
    PromptBudget budget;
    // Only consulted by streaming speech input adapters.
    std::chrono::milliseconds silence_window{3000};
    std::shared_ptr<const MappingConfig> mapping;
    std::shared_ptr<const CharacterCard> card;

    // Throws ConfigError.
    void validate() const;
};

// Returns an ISO-8601 UTC timestamp.
using Clock = std::function<std::string()>;

std::string system_clock_now();
// Always "1970-01-01T00:00:00.000Z"; for reproducible transcripts.
std::string fixed_clock_now();

// Collaborators shared by every session; immutable once built.
struct Engine {
    std::shared_ptr<LlmBackend> llm;
    std::shared_ptr<const EmotionClassifier> classifier;
    Clock clock = system_clock_now;
};

// Seed for attempt `attempt` (0 = first try) of turn `index`.
std::uint64_t derive_turn_seed(std::uint64_t session_seed, std::size_t index, int attempt);

enum class SessionState { open, closed };

std::string_view to_string(SessionState state);

// One conversation. Turns on a session are strictly serialized: a step that
// arrives while another is in flight fails with SessionBusy.
class Session {
public:
    Session(std::string id, SessionConfig config, std::shared_ptr<const Engine> engine);

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const std::string& id() const { return id_; }
    const SessionConfig& config() const { return config_; }

    SessionState state() const;
    std::size_t turn_count() const;
    std::vector<Turn> turns() const;

    // Prompt, complete, guard (regenerating once on a repeat), annotate and
    // record. Throws SessionClosed, SessionBusy, EmptyInput, LLMUnavailable
    // or LLMProtocolError; on error no turn is recorded.
    Turn step(std::string_view human_text);

    void close();

private:
    std::string id_;
    SessionConfig config_;
    std::shared_ptr<const Engine> engine_;

    mutable std::mutex mutex_;
    std::vector<Turn> turns_;
    SessionState state_ = SessionState::open;
    bool busy_ = false;
};

// Produces distinct session ids; a fixed nonce makes the sequence
// reproducible.
class SessionIdGenerator {
public:
    SessionIdGenerator();
    explicit SessionIdGenerator(std::uint64_t nonce) : nonce_(nonce) {}

    std::string next();

private:
    std::mutex mutex_;
    std::uint64_t nonce_;
    std::uint64_t counter_ = 0;
};

std::shared_ptr<Session> create_session(const SessionConfig& config, std::shared_ptr<const Engine> engine,
                                        SessionIdGenerator& ids);

// Thread-safe lookup table of live sessions.
class SessionRegistry {
public:
    SessionRegistry(std::shared_ptr<const Engine> engine, std::uint64_t id_nonce);

    std::shared_ptr<Session> create(const SessionConfig& config);
    // Throws SessionNotFound.
    std::shared_ptr<Session> get(const std::string& id) const;

private:
    std::shared_ptr<const Engine> engine_;
    SessionIdGenerator ids_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// Source of human utterances. Speech front ends end an utterance after
// `silence_window` of silence; text front ends ignore it.
class HumanInputAdapter {
public:
    virtual ~HumanInputAdapter() = default;
    // nullopt at end of input.
    virtual std::optional<std::string> next_utterance() = 0;
};

class StreamingSpeechAdapter : public HumanInputAdapter {
public:
    explicit StreamingSpeechAdapter(std::chrono::milliseconds silence_window)
        : silence_window_(silence_window) {}
    std::chrono::milliseconds silence_window() const { return silence_window_; }

private:
    std::chrono::milliseconds silence_window_;
};

class LineInputAdapter final : public HumanInputAdapter {
public:
    explicit LineInputAdapter(std::istream& in) : in_(in) {}
    std::optional<std::string> next_utterance() override;

private:
    std::istream& in_;
};

}  // namespace emoscript
