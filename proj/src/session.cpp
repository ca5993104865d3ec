#include "emoscript/session.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <random>

#include <spdlog/spdlog.h>

#include "emoscript/error.hpp"
#include "emoscript/unicode.hpp"

namespace emoscript {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), unicode::is_ascii_space);
}

}  // namespace

std::uint64_t derive_turn_seed(std::uint64_t session_seed, std::size_t index, int attempt) {
    return splitmix64(session_seed ^ splitmix64((static_cast<std::uint64_t>(index) << 8) |
                                                static_cast<std::uint64_t>(attempt)));
}

std::string system_clock_now() {
    const auto now = std::chrono::system_clock::now();
    const auto millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    std::tm utc{};
    gmtime_r(&seconds, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &utc);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
    return out;
}

std::string fixed_clock_now() { return "1970-01-01T00:00:00.000Z"; }

std::string_view to_string(SessionState state) {
    return state == SessionState::open ? "open" : "closed";
}

void SessionConfig::validate() const {
    if (turn_limit < 2) {
        throw Error(ErrorCode::ConfigError, "turn_limit must be at least 2 (hello and goodbye)");
    }
    if (!mapping) throw Error(ErrorCode::ConfigError, "session config has no mapping");
    if (!card) throw Error(ErrorCode::ConfigError, "session config has no character card");
    if (budget.max_units == 0 || !budget.estimate) {
        throw Error(ErrorCode::ConfigError, "prompt budget must be positive");
    }
    if (retry.retries < 0) throw Error(ErrorCode::ConfigError, "retries must be non-negative");
}

// ---------------------------------------------------------------------------

Session::Session(std::string id, SessionConfig config, std::shared_ptr<const Engine> engine)
    : id_(std::move(id)), config_(std::move(config)), engine_(std::move(engine)) {
    config_.validate();
    if (!engine_ || !engine_->llm || !engine_->classifier || !engine_->clock) {
        throw Error(ErrorCode::ConfigError, "session engine is incomplete");
    }
}

SessionState Session::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

std::size_t Session::turn_count() const {
    std::lock_guard lock(mutex_);
    return turns_.size();
}

std::vector<Turn> Session::turns() const {
    std::lock_guard lock(mutex_);
    return turns_;
}

void Session::close() {
    std::lock_guard lock(mutex_);
    state_ = SessionState::closed;
}

Turn Session::step(std::string_view human_text) {
    if (is_blank(human_text)) throw Error(ErrorCode::EmptyInput, "human text is empty");

    std::vector<DialogTurn> history;
    std::vector<std::string> robot_lines;
    std::size_t index = 0;
    {
        std::lock_guard lock(mutex_);
        if (state_ == SessionState::closed) {
            throw Error(ErrorCode::SessionClosed, "session " + id_ + " is closed");
        }
        if (busy_) throw Error(ErrorCode::SessionBusy, "session " + id_ + " already has a turn in flight");
        busy_ = true;
        index = turns_.size() + 1;
        for (const auto& turn : turns_) {
            history.push_back({Speaker::human, turn.human_text});
            history.push_back({Speaker::robot, turn.guard.guarded_text});
            robot_lines.push_back(turn.guard.guarded_text);
        }
    }
    struct BusyReset {
        Session& self;
        ~BusyReset() {
            std::lock_guard lock(self.mutex_);
            self.busy_ = false;
        }
    } reset{*this};

    const auto& card = *config_.card;
    const auto& mapping = *config_.mapping;

    Turn turn;
    turn.session_id = id_;
    turn.index = index;
    turn.human_text = std::string(human_text);

    history.push_back({Speaker::human, turn.human_text});
    const auto prompt = build_prompt(card, history, config_.budget);

    SamplingParams params = config_.sampling;
    for (const auto& tag : prompt.stop) {
        if (std::find(params.stop.begin(), params.stop.end(), tag) == params.stop.end()) {
            params.stop.push_back(tag);
        }
    }

    for (int attempt = 0;; ++attempt) {
        turn.seed_used = derive_turn_seed(config_.seed, index, attempt);
        params.seed = turn.seed_used;
        turn.t_request = engine_->clock();
        auto completion = llm_complete(prompt, params, *engine_->llm, config_.retry, card.human_tag);
        turn.t_response = engine_->clock();
        turn.llm_raw = std::move(completion.raw);
        turn.guard = apply_guards(turn.llm_raw, robot_lines, card.human_tag, mapping);
        turn.regenerations = attempt;
        if (!turn.guard.repeated_previous_line || attempt >= 1) break;
        spdlog::info("session {} turn {}: reply repeats a previous line, regenerating", id_, index);
    }

    SeededRng rng(turn.seed_used);
    Annotation annotation;
    try {
        annotation = annotate(turn.guard.guarded_text, *engine_->classifier, mapping, rng);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::AnnotationError) throw;
        spdlog::warn("session {} turn {}: {}; using default genres", id_, index, e.what());
        SeededRng fallback_rng(turn.seed_used);
        annotation = annotate_with_default_genres(turn.guard.guarded_text, mapping, fallback_rng);
        turn.classifier_fallback = true;
    }
    for (const auto& emoji : annotation.unmapped_emoji) {
        spdlog::warn("session {} turn {}: no routine mapped for emoji {}", id_, index, emoji);
    }
    turn.script = std::move(annotation.script);

    std::lock_guard lock(mutex_);
    turns_.push_back(turn);
    if (turns_.size() >= config_.turn_limit) state_ = SessionState::closed;
    return turn;
}

// ---------------------------------------------------------------------------

SessionIdGenerator::SessionIdGenerator() : nonce_(std::random_device{}() | (std::uint64_t{std::random_device{}()} << 32)) {}

std::string SessionIdGenerator::next() {
    std::lock_guard lock(mutex_);
    const std::uint64_t value = splitmix64(nonce_ + ++counter_);
    char buf[24];
    std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::shared_ptr<Session> create_session(const SessionConfig& config, std::shared_ptr<const Engine> engine,
                                        SessionIdGenerator& ids) {
    return std::make_shared<Session>(ids.next(), config, std::move(engine));
}

SessionRegistry::SessionRegistry(std::shared_ptr<const Engine> engine, std::uint64_t id_nonce)
    : engine_(std::move(engine)), ids_(id_nonce) {}

std::shared_ptr<Session> SessionRegistry::create(const SessionConfig& config) {
    auto session = create_session(config, engine_, ids_);
    std::lock_guard lock(mutex_);
    sessions_.emplace(session->id(), session);
    return session;
}

std::shared_ptr<Session> SessionRegistry::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    throw Error(ErrorCode::SessionNotFound, "no session with id " + id);
}

// ---------------------------------------------------------------------------

std::optional<std::string> LineInputAdapter::next_utterance() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace emoscript
