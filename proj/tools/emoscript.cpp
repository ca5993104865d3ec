// emoscript: command-line entry point for chat, serve, annotate, replay and
// analyze.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "emoscript/analysis.hpp"
#include "emoscript/config.hpp"
#include "emoscript/error.hpp"
#include "emoscript/service.hpp"
#include "emoscript/transcript.hpp"
#include "emoscript/unicode.hpp"

using namespace emoscript;
using nlohmann::json;

namespace {

struct CommonOptions {
    std::string config_path = default_config_path().string();
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> turn_limit;
    bool fixed_clock = false;
};

AppConfig load_config(const CommonOptions& opts) {
    auto config = AppConfig::load(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.turn_limit) config.turn_limit = *opts.turn_limit;
    return config;
}

std::shared_ptr<const Engine> make_engine(const Runtime& runtime, bool fixed_clock) {
    auto engine = std::make_shared<Engine>();
    engine->llm = runtime.llm;
    engine->classifier = runtime.classifier;
    engine->clock = fixed_clock ? Clock(fixed_clock_now) : Clock(system_clock_now);
    return engine;
}

std::uint64_t id_nonce(const CommonOptions& opts) {
    if (opts.fixed_clock) return 0;
    return std::random_device{}();
}

void print_script(std::ostream& out, const std::string& robot_name, const BehaviorScript& script) {
    for (const auto& element : script.elements) {
        if (const auto* speech = std::get_if<SpeechElement>(&element)) {
            out << robot_name << " [" << to_string(speech->genre) << "] " << speech->text << '\n';
        } else {
            const auto& action = std::get<ActionElement>(element);
            out << "  ⟨routine: " << action.routine << "⟩ " << action.source_emoji << '\n';
        }
    }
}

int run_chat(const CommonOptions& opts, const std::string& transcript_arg) {
    const auto config = load_config(opts);
    const auto runtime = build_runtime(config);
    SessionIdGenerator ids(id_nonce(opts));
    auto session = create_session(runtime.session, make_engine(runtime, opts.fixed_clock), ids);
    const std::string transcript_path =
        transcript_arg.empty() ? "transcript-" + session->id() + ".jsonl" : transcript_arg;
    const std::string robot = runtime.card->name.empty() ? "Robot" : runtime.card->name;

    std::cout << "Session " << session->id() << " (" << session->config().turn_limit
              << " turns). Ctrl-D ends the conversation.\n";
    LineInputAdapter input(std::cin);
    for (;;) {
        std::cout << "You: " << std::flush;
        auto line = input.next_utterance();
        if (!line) {
            std::cout << '\n';
            break;
        }
        if (!unicode::is_valid_utf8(*line)) {
            std::cout << "[error] input is not valid UTF-8\n";
            continue;
        }
        try {
            const auto turn = session->step(*line);
            print_script(std::cout, robot, turn.script);
            std::cout << "(turn " << turn.index << "/" << session->config().turn_limit << ")\n";
        } catch (const Error& e) {
            if (e.code() == ErrorCode::EmptyInput) continue;
            std::cout << "[error] " << to_string(e.code()) << ": " << e.what() << '\n';
            if (e.code() == ErrorCode::SessionClosed) break;
            continue;
        }
        if (session->state() == SessionState::closed) {
            std::cout << "Session complete (" << session->turn_count() << "/" << session->config().turn_limit
                      << " turns).\n";
            break;
        }
    }
    if (session->turn_count() > 0) {
        persist_transcript(*session, transcript_path);
        std::cout << "Transcript written to " << transcript_path << '\n';
    }
    return 0;
}

httplib::Server* g_server = nullptr;

void handle_signal(int) {
    if (g_server) g_server->stop();
}

int run_serve(const CommonOptions& opts, const std::string& host, int port) {
    const auto config = load_config(opts);
    const auto runtime = build_runtime(config);
    ApiService service(make_engine(runtime, opts.fixed_clock), runtime.session, id_nonce(opts));
    httplib::Server server;
    service.register_routes(server);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    if (!server.bind_to_port(host, port)) {
        std::cerr << "emoscript serve: cannot bind " << host << ":" << port << '\n';
        return 1;
    }
    spdlog::info("listening on {}:{}", host, port);
    std::cout << "listening on " << host << ":" << port << std::endl;
    const bool ok = server.listen_after_bind();
    service.shutdown();
    g_server = nullptr;
    return ok ? 0 : 1;
}

int run_annotate(const CommonOptions& opts, const std::string& in_path) {
    const auto config = load_config(opts);
    const auto mapping = MappingConfig::load(config.mapping_path);
    const auto classifier = make_classifier(config.classifier, config.lexicon_path);
    const std::uint64_t seed = opts.seed.value_or(config.seed);

    std::ifstream in(in_path, std::ios::binary);
    if (!in) {
        std::cerr << "emoscript annotate: cannot open " << in_path << '\n';
        return 1;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!unicode::is_valid_utf8(line)) {
            std::cerr << "emoscript annotate: line " << line_no << " is not valid UTF-8\n";
            return 2;
        }
        const auto line_seed = derive_turn_seed(seed, line_no, 0);
        SeededRng rng(line_seed);
        const auto annotation = annotate(line, *classifier, mapping, rng);
        json emotions = json::array();
        for (const auto& p : annotation.script.emotion_trace()) emotions.push_back(prediction_to_json(p));
        json record = {{"line", line_no},
                       {"text", line},
                       {"seed", line_seed},
                       {"script", script_to_json(annotation.script)},
                       {"emotions", std::move(emotions)}};
        if (!annotation.unmapped_emoji.empty()) record["unmapped_emoji"] = annotation.unmapped_emoji;
        std::cout << record.dump() << '\n';
    }
    return 0;
}

int run_replay(const CommonOptions& opts, const std::string& transcript_path, bool suggest,
               std::size_t sentence_cap) {
    const auto config = load_config(opts);
    const auto mapping = MappingConfig::load(config.mapping_path);
    const auto card = load_card(config.card_path, &mapping);
    const auto classifier = make_classifier(config.classifier, config.lexicon_path);
    const auto turns = read_transcript(std::filesystem::path(transcript_path));

    const auto results = replay_transcript(turns, *classifier, mapping, card.human_tag);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const auto& r = results[i];
        std::cout << turns[i].session_id << " #" << turns[i].index << ": "
                  << (r.ok() ? "ok" : (r.guard_matches ? "SCRIPT MISMATCH" : "GUARD MISMATCH")) << '\n';
        mismatches += r.ok() ? 0 : 1;
    }
    if (suggest) {
        std::cout << "\nSuggested annotations:\n";
        for (const auto& s : suggest_annotations(turns, mapping, card.human_tag, sentence_cap)) {
            if (s.flags.empty()) continue;
            std::cout << s.key.session_id << " #" << s.key.index << ":";
            for (auto flag : s.flags) std::cout << ' ' << to_string(flag);
            std::cout << '\n';
        }
    }
    std::cout << turns.size() - mismatches << "/" << turns.size() << " turns replayed identically\n";
    return mismatches == 0 ? 0 : 3;
}

int run_analyze(const std::vector<std::string>& transcript_paths, const std::vector<std::string>& annotation_paths,
                const std::string& feedback_path, bool as_json, bool yates) {
    std::vector<Turn> turns;
    for (const auto& path : transcript_paths) {
        auto more = read_transcript(std::filesystem::path(path));
        turns.insert(turns.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    std::vector<AnnotationRecord> annotations;
    for (const auto& path : annotation_paths) {
        auto more = read_annotations(std::filesystem::path(path));
        annotations.insert(annotations.end(), more.begin(), more.end());
    }
    std::optional<std::vector<FeedbackLabel>> feedback;
    if (!feedback_path.empty()) feedback = read_feedback(feedback_path);

    const auto report = analyze(turns, annotations, feedback, yates);
    if (as_json) {
        std::cout << report_to_json(report).dump(2) << '\n';
    } else {
        std::cout << render_report_text(report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expressive robot behavior from chat-LLM output"};
    app.require_subcommand(1);
    CommonOptions opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "Configuration file")->check(CLI::ExistingFile);
    };
    auto add_session = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opts.seed, "Session seed");
        cmd->add_option("--turn-limit", opts.turn_limit, "Turns per session")->check(CLI::Range(2, 1000000));
        cmd->add_flag("--fixed-clock", opts.fixed_clock, "Constant timestamps and session ids (reproducible transcripts)");
    };

    auto* chat = app.add_subcommand("chat", "Interactive console conversation");
    std::string chat_transcript;
    add_common(chat);
    add_session(chat);
    chat->add_option("--transcript", chat_transcript, "Transcript output path");

    auto* serve = app.add_subcommand("serve", "HTTP API for live sessions");
    std::string host = "127.0.0.1";
    int port = 0;
    add_common(serve);
    add_session(serve);
    serve->add_option("--port", port, "Listen port")->required()->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "Listen address");

    auto* annotate_cmd = app.add_subcommand("annotate", "Behavior scripts for a file of utterances");
    std::string in_path;
    add_common(annotate_cmd);
    annotate_cmd->add_option("--in", in_path, "One utterance per line")->required()->check(CLI::ExistingFile);
    annotate_cmd->add_option("--seed", opts.seed, "Routine selection seed");

    auto* replay = app.add_subcommand("replay", "Re-derive recorded scripts and compare");
    std::string replay_path;
    bool suggest = false;
    std::size_t sentence_cap = 4;
    add_common(replay);
    replay->add_option("--transcript", replay_path, "Transcript file")->required()->check(CLI::ExistingFile);
    replay->add_flag("--suggest", suggest, "Print suggested error annotations");
    replay->add_option("--sentence-cap", sentence_cap, "Sentence count above which ReplyTooLong is suggested");

    auto* analyze_cmd = app.add_subcommand("analyze", "Error analysis over annotated transcripts");
    std::vector<std::string> transcripts, annotations;
    std::string feedback;
    bool as_json = false, yates = false;
    analyze_cmd->add_option("--transcripts", transcripts, "Transcript files")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--annotations", annotations, "Annotation side-car files")
        ->required()
        ->check(CLI::ExistingFile);
    analyze_cmd->add_option("--feedback", feedback, "Feedback label file")->check(CLI::ExistingFile);
    analyze_cmd->add_flag("--json", as_json, "Machine-readable output");
    analyze_cmd->add_flag("--yates", yates, "Apply Yates' continuity correction");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_default_logger(spdlog::stderr_color_mt("emoscript"));
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);

    try {
        if (*chat) return run_chat(opts, chat_transcript);
        if (*serve) {
            spdlog::set_level(spdlog::level::info);
            return run_serve(opts, host, port);
        }
        if (*annotate_cmd) return run_annotate(opts, in_path);
        if (*replay) return run_replay(opts, replay_path, suggest, sentence_cap);
        if (*analyze_cmd) return run_analyze(transcripts, annotations, feedback, as_json, yates);
    } catch (const Error& e) {
        std::cerr << "emoscript: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    }
    return 0;
}
