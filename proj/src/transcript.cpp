#include "emoscript/transcript.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "emoscript/error.hpp"

namespace emoscript {

using nlohmann::json;

namespace {

[[noreturn]] void bad_record(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

EmotionPrediction prediction_from_json(const json& item) {
    const auto label = parse_emotion(item.at("label").get<std::string>());
    if (!label) bad_record("unknown emotion label in transcript");
    return {*label, item.at("confidence").get<double>()};
}

}  // namespace

json prediction_to_json(const EmotionPrediction& prediction) {
    return {{"label", to_string(prediction.label)}, {"confidence", prediction.confidence}};
}

json script_to_json(const BehaviorScript& script) {
    json items = json::array();
    for (const auto& element : script.elements) {
        if (const auto* speech = std::get_if<SpeechElement>(&element)) {
            items.push_back({{"kind", "speech"}, {"text", speech->text}, {"genre", to_string(speech->genre)}});
        } else {
            const auto& action = std::get<ActionElement>(element);
            items.push_back({{"kind", "action"}, {"routine", action.routine}, {"emoji", action.source_emoji}});
        }
    }
    return items;
}

BehaviorScript script_from_json(const json& items, const json& emotions) {
    BehaviorScript script;
    std::size_t next_emotion = 0;
    for (const auto& item : items) {
        const auto kind = item.at("kind").get<std::string>();
        if (kind == "speech") {
            const auto genre = parse_genre(item.at("genre").get<std::string>());
            if (!genre) bad_record("unknown voice genre in transcript");
            if (next_emotion >= emotions.size()) bad_record("fewer emotions than speech elements");
            script.elements.emplace_back(SpeechElement{item.at("text").get<std::string>(), *genre,
                                                       prediction_from_json(emotions.at(next_emotion++))});
        } else if (kind == "action") {
            script.elements.emplace_back(
                ActionElement{item.at("routine").get<std::string>(), item.at("emoji").get<std::string>()});
        } else {
            bad_record("unknown script element kind '" + kind + "'");
        }
    }
    if (next_emotion != emotions.size()) bad_record("more emotions than speech elements");
    return script;
}

json turn_to_json(const Turn& turn) {
    json emotions = json::array();
    for (const auto& prediction : turn.emotion_trace()) emotions.push_back(prediction_to_json(prediction));
    json record = {
        {"session_id", turn.session_id},
        {"index", turn.index},
        {"human_text", turn.human_text},
        {"llm_raw", turn.llm_raw},
        {"guarded_text", turn.guard.guarded_text},
        {"guard_flags",
         {{"stripped_human_turn", turn.guard.stripped_human_turn},
          {"repeated_previous_line", turn.guard.repeated_previous_line},
          {"truncated_for_length", turn.guard.truncated_for_length}}},
        {"script", script_to_json(turn.script)},
        {"emotions", std::move(emotions)},
        {"seed", turn.seed_used},
        {"t_request", turn.t_request},
        {"t_response", turn.t_response},
        {"classifier_fallback", turn.classifier_fallback},
        {"regenerations", turn.regenerations},
    };
    if (turn.error_annotation) {
        record["error_annotation"] = {{"human_error", to_string(turn.error_annotation->human)},
                                      {"llm_error", to_string(turn.error_annotation->llm)}};
    }
    return record;
}

Turn turn_from_json(const json& record) {
    Turn turn;
    try {
        turn.session_id = record.at("session_id").get<std::string>();
        turn.index = record.at("index").get<std::size_t>();
        turn.human_text = record.at("human_text").get<std::string>();
        turn.llm_raw = record.at("llm_raw").get<std::string>();
        turn.guard.guarded_text = record.at("guarded_text").get<std::string>();
        const auto& flags = record.at("guard_flags");
        turn.guard.stripped_human_turn = flags.at("stripped_human_turn").get<bool>();
        turn.guard.repeated_previous_line = flags.at("repeated_previous_line").get<bool>();
        turn.guard.truncated_for_length = flags.at("truncated_for_length").get<bool>();
        turn.script = script_from_json(record.at("script"), record.at("emotions"));
        turn.seed_used = record.at("seed").get<std::uint64_t>();
        turn.t_request = record.at("t_request").get<std::string>();
        turn.t_response = record.at("t_response").get<std::string>();
        turn.classifier_fallback = record.value("classifier_fallback", false);
        turn.regenerations = record.value("regenerations", 0);
        if (record.contains("error_annotation") && !record["error_annotation"].is_null()) {
            const auto& ann = record["error_annotation"];
            const auto human = parse_human_error(ann.at("human_error").get<std::string>());
            const auto llm = parse_llm_error(ann.at("llm_error").get<std::string>());
            if (!human || !llm) bad_record("unknown error annotation type");
            turn.error_annotation = ErrorAnnotation{*human, *llm};
        }
    } catch (const json::exception& e) {
        bad_record(std::string("malformed transcript record: ") + e.what());
    }
    return turn;
}

std::string turn_to_line(const Turn& turn) { return turn_to_json(turn).dump(); }

void write_transcript(std::ostream& out, std::span<const Turn> turns) {
    if (turns.empty()) throw Error(ErrorCode::StorageError, "cannot persist a session with no turns");
    for (const auto& turn : turns) out << turn_to_line(turn) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StorageError, "failed writing transcript");
}

void persist_transcript(std::span<const Turn> turns, const std::filesystem::path& path) {
    if (turns.empty()) throw Error(ErrorCode::StorageError, "cannot persist a session with no turns");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageError, "cannot open transcript for writing: " + path.string());
    write_transcript(out, turns);
}

void persist_transcript(const Session& session, const std::filesystem::path& path) {
    const auto turns = session.turns();
    persist_transcript(std::span<const Turn>(turns), path);
}

std::vector<Turn> read_transcript(std::istream& in) {
    std::vector<Turn> turns;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            turns.push_back(turn_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, "transcript line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, "transcript line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return turns;
}

std::vector<Turn> read_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open transcript: " + path.string());
    return read_transcript(in);
}

ReplayResult replay_turn(const Turn& turn, std::span<const std::string> prior_robot_lines,
                         const EmotionClassifier& classifier, const MappingConfig& mapping,
                         std::string_view human_tag) {
    ReplayResult result;
    result.guard = apply_guards(turn.llm_raw, prior_robot_lines, human_tag, mapping);
    SeededRng rng(turn.seed_used);
    result.script = turn.classifier_fallback
                        ? annotate_with_default_genres(result.guard.guarded_text, mapping, rng).script
                        : annotate(result.guard.guarded_text, classifier, mapping, rng).script;
    result.guard_matches = result.guard == turn.guard;

    json replayed_emotions = json::array();
    for (const auto& p : result.script.emotion_trace()) replayed_emotions.push_back(prediction_to_json(p));
    json stored_emotions = json::array();
    for (const auto& p : turn.emotion_trace()) stored_emotions.push_back(prediction_to_json(p));
    result.script_matches = script_to_json(result.script).dump() == script_to_json(turn.script).dump() &&
                            replayed_emotions.dump() == stored_emotions.dump();
    return result;
}

std::vector<ReplayResult> replay_transcript(std::span<const Turn> turns, const EmotionClassifier& classifier,
                                            const MappingConfig& mapping, std::string_view human_tag) {
    std::map<std::string, std::vector<std::string>> robot_lines;
    std::vector<ReplayResult> results;
    results.reserve(turns.size());
    for (const auto& turn : turns) {
        auto& prior = robot_lines[turn.session_id];
        results.push_back(replay_turn(turn, prior, classifier, mapping, human_tag));
        prior.push_back(turn.guard.guarded_text);
    }
    return results;
}

}  // namespace emoscript
