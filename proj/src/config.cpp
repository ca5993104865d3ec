#include "emoscript/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emoscript/error.hpp"

#ifndef EMOSCRIPT_DATA_DIR
#define EMOSCRIPT_DATA_DIR "data"
#endif

namespace emoscript {

using nlohmann::json;

std::optional<std::string> process_env(const char* name) {
    if (const char* value = std::getenv(name)) return std::string(value);
    return std::nullopt;
}

std::filesystem::path default_data_dir() {
    if (auto dir = process_env("EMOSCRIPT_DATA_DIR")) return *dir;
    return EMOSCRIPT_DATA_DIR;
}

std::filesystem::path default_config_path() { return default_data_dir() / "config.json"; }

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

std::string resolve_mock(const std::filesystem::path& base, const std::string& endpoint) {
    if (endpoint.rfind("mock:", 0) != 0) return endpoint;
    return "mock:" + resolve(base, endpoint.substr(5)).string();
}

template <typename T>
T parse_number(const std::string& name, const std::string& text) {
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_floating_point_v<T>) {
            value = static_cast<T>(std::stod(text, &used));
        } else {
            value = static_cast<T>(std::stoull(text, &used));
        }
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        config_error("environment variable " + name + " is not a valid number: '" + text + "'");
    }
}

}  // namespace

AppConfig AppConfig::load(const std::filesystem::path& path, const EnvLookup& env) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    AppConfig config;
    try {
        const auto doc = json::parse(buf.str());
        config.mapping_path = resolve(base, doc.at("mapping").get<std::string>());
        config.lexicon_path = resolve(base, doc.at("lexicon").get<std::string>());
        config.card_path = resolve(base, doc.at("card").get<std::string>());

        if (doc.contains("llm")) {
            const auto& llm = doc["llm"];
            config.llm.endpoint = resolve_mock(base, llm.value("endpoint", config.llm.endpoint));
            config.llm.model = llm.value("model", config.llm.model);
            config.llm.temperature = llm.value("temperature", config.llm.temperature);
            config.llm.max_output_units = llm.value("max_output_units", config.llm.max_output_units);
            config.llm.timeout = std::chrono::milliseconds(llm.value("timeout_ms", 30000));
            config.llm.retry.retries = llm.value("retries", config.llm.retry.retries);
            config.llm.retry.initial_backoff = std::chrono::milliseconds(llm.value("backoff_ms", 250));
            config.llm.retry.deadline = std::chrono::milliseconds(llm.value("deadline_ms", 120000));
        }
        if (doc.contains("classifier")) {
            const auto& classifier = doc["classifier"];
            config.classifier.kind = classifier.value("kind", config.classifier.kind);
            config.classifier.endpoint = classifier.value("endpoint", std::string());
            config.classifier.timeout = std::chrono::milliseconds(classifier.value("timeout_ms", 2000));
        }
        if (doc.contains("session")) {
            const auto& session = doc["session"];
            config.turn_limit = session.value("turn_limit", config.turn_limit);
            config.seed = session.value("seed", config.seed);
            config.prompt_budget_units = session.value("prompt_budget_units", config.prompt_budget_units);
            config.silence_window = std::chrono::milliseconds(session.value("silence_window_ms", 3000));
        }
    } catch (const json::exception& e) {
        config_error("config " + path.string() + ": " + e.what());
    }
    config.apply_env(env);
    return config;
}

void AppConfig::apply_env(const EnvLookup& env) {
    if (auto v = env("EMOSCRIPT_LLM_ENDPOINT")) llm.endpoint = *v;
    if (auto v = env("EMOSCRIPT_LLM_MODEL")) llm.model = *v;
    if (auto v = env("EMOSCRIPT_LLM_TEMPERATURE")) llm.temperature = parse_number<double>("EMOSCRIPT_LLM_TEMPERATURE", *v);
    if (auto v = env("EMOSCRIPT_CLASSIFIER")) classifier.kind = *v;
    if (auto v = env("EMOSCRIPT_CLASSIFIER_ENDPOINT")) classifier.endpoint = *v;
    if (auto v = env("EMOSCRIPT_SEED")) seed = parse_number<std::uint64_t>("EMOSCRIPT_SEED", *v);
    if (auto v = env("EMOSCRIPT_TURN_LIMIT")) turn_limit = parse_number<std::size_t>("EMOSCRIPT_TURN_LIMIT", *v);
}

namespace {

const std::vector<std::string>& builtin_replies() {
    static const std::vector<std::string> replies = {
        "😀 Hi there! I'm Haru. What shall we talk about today?",
        "😮 Whoa...That's amazing! Tell me more?",
        "😊 I love hearing about your day!",
        "😢 Oh no, that sounds really hard. I'm here for you.",
        "🤔 Hmm, what do you think we should do next?",
    };
    return replies;
}

}  // namespace

std::unique_ptr<LlmBackend> make_backend(const LlmSettings& settings) {
    if (settings.endpoint == "mock") return std::make_unique<CannedBackend>(builtin_replies());
    if (settings.endpoint.rfind("mock:", 0) == 0) {
        return std::make_unique<CannedBackend>(CannedBackend::load(settings.endpoint.substr(5)));
    }
    return std::make_unique<HttpChatBackend>(settings.endpoint, settings.model, settings.timeout);
}

std::unique_ptr<EmotionClassifier> make_classifier(const ClassifierSettings& settings,
                                                   const std::filesystem::path& lexicon_path) {
    if (settings.kind == "lexicon") {
        return std::make_unique<LexiconClassifier>(EmotionLexicon::load(lexicon_path));
    }
    if (settings.kind == "remote") {
        if (settings.endpoint.empty()) config_error("remote classifier needs an endpoint");
        return std::make_unique<RemoteClassifier>(settings.endpoint, settings.timeout);
    }
    config_error("unknown classifier kind '" + settings.kind + "'");
}

Runtime build_runtime(const AppConfig& config) {
    Runtime runtime;
    auto mapping = std::make_shared<MappingConfig>(MappingConfig::load(config.mapping_path));
    runtime.mapping = mapping;
    runtime.card = std::make_shared<CharacterCard>(load_card(config.card_path, mapping.get()));
    runtime.classifier = make_classifier(config.classifier, config.lexicon_path);
    runtime.llm = make_backend(config.llm);

    auto& session = runtime.session;
    session.turn_limit = config.turn_limit;
    session.seed = config.seed;
    session.sampling.temperature = config.llm.temperature;
    session.sampling.max_output_units = config.llm.max_output_units;
    session.retry = config.llm.retry;
    session.budget.max_units = config.prompt_budget_units;
    session.silence_window = config.silence_window;
    session.mapping = runtime.mapping;
    session.card = runtime.card;
    session.validate();
    return runtime;
}

}  // namespace emoscript
