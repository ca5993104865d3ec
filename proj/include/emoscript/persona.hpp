#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "emoscript/behavior.hpp"

namespace emoscript {

enum class Speaker { human, robot };

std::string_view to_string(Speaker speaker);

struct DialogTurn {
    Speaker speaker = Speaker::human;
    std::string text;

    bool operator==(const DialogTurn&) const = default;
};

struct ExampleConversation {
    std::string title;
    // Alternating utterances, human first.
    std::vector<DialogTurn> utterances;

    // Exchanges, i.e. human utterances with their robot replies.
    std::size_t turn_count() const { return (utterances.size() + 1) / 2; }
};

inline constexpr std::size_t kMaxExamples = 5;
inline constexpr std::size_t kMaxExampleTurns = 5;
inline constexpr int kCardSchemaVersion = 1;

struct CharacterCard {
    std::string name;
    std::string persona;
    std::vector<ExampleConversation> examples;
    std::string robot_tag = "Haru:";
    std::string human_tag = "Human:";

    // Structural checks, plus emoji coverage of every example set in
    // `coverage.emotion_emojis` when given. Throws ValidationError.
    void validate(const MappingConfig* coverage = nullptr) const;
};

CharacterCard parse_card(std::string_view json_text, const MappingConfig* coverage = nullptr);
CharacterCard load_card(const std::filesystem::path& path, const MappingConfig* coverage = nullptr);

// ceil(code points / 4); a rough token count.
std::size_t estimate_units(std::string_view text);

struct PromptBudget {
    std::size_t max_units = 3072;
    std::function<std::size_t(std::string_view)> estimate = estimate_units;
};

struct Prompt {
    // Persona and retained examples; sent as the system message.
    std::string system;
    // Retained suffix of the dialog history, ending with the human turn.
    std::vector<DialogTurn> history;
    // Full flattened prompt ending with the robot tag cue.
    std::string text;
    std::vector<std::string> stop;
    std::size_t examples_used = 0;
    std::size_t history_dropped = 0;
};

// Layout: persona, a blank line, each retained example (tagged lines,
// examples separated by blank lines) under an "Example conversations:"
// header, then the history under "Conversation:", then the robot tag.
// Over budget, the oldest history turns go first, then whole examples oldest
// first. Throws BudgetImpossible when persona plus the latest human turn do
// not fit, ValidationError when history does not end with a human turn.
Prompt build_prompt(const CharacterCard& card, const std::vector<DialogTurn>& history,
                    const PromptBudget& budget);

// Longest suffix of `history` whose rendered lines fit in budget minus
// `reserved_units`. Always keeps the latest turn.
std::vector<DialogTurn> truncate_history(const std::vector<DialogTurn>& history,
                                         const PromptBudget& budget,
                                         std::size_t reserved_units = 0,
                                         std::string_view human_tag = "Human:",
                                         std::string_view robot_tag = "Haru:");

}  // namespace emoscript
