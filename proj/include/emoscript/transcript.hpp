#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "emoscript/session.hpp"

namespace emoscript {

// Script elements as {kind: "speech", text, genre} / {kind: "action",
// routine, emoji}. Speech emotions travel separately in "emotions".
nlohmann::json script_to_json(const BehaviorScript& script);
BehaviorScript script_from_json(const nlohmann::json& items, const nlohmann::json& emotions);

nlohmann::json prediction_to_json(const EmotionPrediction& prediction);

// One transcript record:
// {session_id, index, human_text, llm_raw, guarded_text,
//  guard_flags: {stripped_human_turn, repeated_previous_line, truncated_for_length},
//  script: [...], emotions: [{label, confidence}], seed, t_request, t_response,
//  classifier_fallback, regenerations, error_annotation?: {human_error, llm_error}}
nlohmann::json turn_to_json(const Turn& turn);
Turn turn_from_json(const nlohmann::json& record);

// Serialized record without a trailing newline.
std::string turn_to_line(const Turn& turn);

// Throws StorageError when `turns` is empty or the stream fails.
void write_transcript(std::ostream& out, std::span<const Turn> turns);
void persist_transcript(const Session& session, const std::filesystem::path& path);
void persist_transcript(std::span<const Turn> turns, const std::filesystem::path& path);

// Throws ParseError naming the offending line.
std::vector<Turn> read_transcript(std::istream& in);
std::vector<Turn> read_transcript(const std::filesystem::path& path);

struct ReplayResult {
    GuardReport guard;
    BehaviorScript script;
    bool guard_matches = false;
    bool script_matches = false;

    bool ok() const { return guard_matches && script_matches; }
};

// Re-derives a recorded turn from its llm_raw and seed. `prior_robot_lines`
// are the guarded texts of the session's earlier turns.
ReplayResult replay_turn(const Turn& turn, std::span<const std::string> prior_robot_lines,
                         const EmotionClassifier& classifier, const MappingConfig& mapping,
                         std::string_view human_tag);

// Replays every turn in order, grouping by session id.
std::vector<ReplayResult> replay_transcript(std::span<const Turn> turns, const EmotionClassifier& classifier,
                                            const MappingConfig& mapping, std::string_view human_tag);

}  // namespace emoscript
