#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "emoscript/behavior.hpp"
#include "emoscript/emotion.hpp"
#include "emoscript/llm.hpp"
#include "emoscript/persona.hpp"
#include "emoscript/session.hpp"

namespace emoscript {

struct LlmSettings {
    // "mock", "mock:<replies.json>", or an http(s) chat-completions URL.
    std::string endpoint = "mock";
    std::string model = "llama-2-70b-chat";
    double temperature = 0.7;
    std::size_t max_output_units = 256;
    std::chrono::milliseconds timeout{30000};
    RetryPolicy retry;
};

struct ClassifierSettings {
    // "lexicon" or "remote".
    std::string kind = "lexicon";
    std::string endpoint;
    std::chrono::milliseconds timeout{2000};
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

std::optional<std::string> process_env(const char* name);

// Everything the CLI and service need, from one JSON file. Relative paths are
// resolved against the file's directory. Environment variables override the
// file:
//   EMOSCRIPT_LLM_ENDPOINT, EMOSCRIPT_LLM_MODEL, EMOSCRIPT_LLM_TEMPERATURE,
//   EMOSCRIPT_CLASSIFIER, EMOSCRIPT_CLASSIFIER_ENDPOINT, EMOSCRIPT_SEED,
//   EMOSCRIPT_TURN_LIMIT
struct AppConfig {
    std::filesystem::path mapping_path;
    std::filesystem::path lexicon_path;
    std::filesystem::path card_path;
    LlmSettings llm;
    ClassifierSettings classifier;
    std::size_t turn_limit = kDefaultTurnLimit;
    std::uint64_t seed = 0;
    std::size_t prompt_budget_units = 3072;
    std::chrono::milliseconds silence_window{3000};

    static AppConfig load(const std::filesystem::path& path, const EnvLookup& env = process_env);
    void apply_env(const EnvLookup& env);
};

// Location of the shipped data directory (config, mapping, lexicon, card).
std::filesystem::path default_data_dir();
std::filesystem::path default_config_path();

std::unique_ptr<LlmBackend> make_backend(const LlmSettings& settings);
std::unique_ptr<EmotionClassifier> make_classifier(const ClassifierSettings& settings,
                                                   const std::filesystem::path& lexicon_path);

// Loaded, validated collaborators for running sessions.
struct Runtime {
    std::shared_ptr<const MappingConfig> mapping;
    std::shared_ptr<const CharacterCard> card;
    std::shared_ptr<const EmotionClassifier> classifier;
    std::shared_ptr<LlmBackend> llm;
    SessionConfig session;
};

Runtime build_runtime(const AppConfig& config);

}  // namespace emoscript
