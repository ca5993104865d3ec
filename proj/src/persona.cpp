#include "emoscript/persona.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emoscript/error.hpp"
#include "emoscript/unicode.hpp"

namespace emoscript {

using nlohmann::json;

std::string_view to_string(Speaker speaker) {
    return speaker == Speaker::human ? "human" : "robot";
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

bool is_blank(std::string_view text) {
    for (const char c : text) {
        if (!unicode::is_ascii_space(c)) return false;
    }
    return true;
}

void check_alternation(const std::vector<DialogTurn>& turns, const std::string& where) {
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const Speaker expected = i % 2 == 0 ? Speaker::human : Speaker::robot;
        if (turns[i].speaker != expected) invalid(where + ": speakers must alternate starting with human");
    }
}

std::set<std::string> robot_emoji(const CharacterCard& card) {
    std::set<std::string> found;
    for (const auto& example : card.examples) {
        for (const auto& turn : example.utterances) {
            if (turn.speaker != Speaker::robot) continue;
            for (const auto& token : tokenize(turn.text)) {
                if (token.is_emoji()) found.insert(canonical_emoji(token.text));
            }
        }
    }
    return found;
}

}  // namespace

void CharacterCard::validate(const MappingConfig* coverage) const {
    if (is_blank(persona)) invalid("persona is empty");
    if (is_blank(robot_tag)) invalid("robot_tag is empty");
    if (is_blank(human_tag)) invalid("human_tag is empty");
    if (robot_tag == human_tag) invalid("robot_tag and human_tag must differ");
    if (examples.size() > kMaxExamples) {
        invalid("card has " + std::to_string(examples.size()) + " examples; at most " +
                std::to_string(kMaxExamples) + " allowed");
    }
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& example = examples[i];
        const auto where = "example " + std::to_string(i + 1);
        if (example.utterances.empty()) invalid(where + " is empty");
        if (example.turn_count() > kMaxExampleTurns) {
            invalid(where + ": example exceeds " + std::to_string(kMaxExampleTurns) + " turns");
        }
        check_alternation(example.utterances, where);
        for (const auto& turn : example.utterances) {
            if (is_blank(turn.text)) invalid(where + " has an empty utterance");
        }
    }
    if (!coverage) return;
    const auto found = robot_emoji(*this);
    for (const auto& [label, emojis] : coverage->emotion_emojis) {
        bool covered = false;
        for (const auto& emoji : emojis) covered = covered || found.count(canonical_emoji(emoji)) > 0;
        if (!covered) {
            invalid("examples contain no " + std::string(to_string(label)) + " emoji in robot utterances");
        }
    }
}

CharacterCard parse_card(std::string_view json_text, const MappingConfig* coverage) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("card: ") + e.what());
    }
    CharacterCard card;
    try {
        const int version = doc.value("schema_version", kCardSchemaVersion);
        if (version != kCardSchemaVersion) {
            invalid("unsupported card schema_version " + std::to_string(version));
        }
        card.name = doc.value("name", std::string());
        card.persona = doc.at("persona").get<std::string>();
        card.robot_tag = doc.value("robot_tag", card.robot_tag);
        card.human_tag = doc.value("human_tag", card.human_tag);
        for (const auto& item : doc.at("examples")) {
            ExampleConversation example;
            example.title = item.value("title", std::string());
            for (const auto& turn : item.at("turns")) {
                const auto speaker = turn.at("speaker").get<std::string>();
                if (speaker != "human" && speaker != "robot") invalid("unknown speaker '" + speaker + "'");
                example.utterances.push_back(
                    {speaker == "human" ? Speaker::human : Speaker::robot, turn.at("text").get<std::string>()});
            }
            card.examples.push_back(std::move(example));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("card: ") + e.what());
    }
    card.validate(coverage);
    return card;
}

CharacterCard load_card(const std::filesystem::path& path, const MappingConfig* coverage) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open card file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_card(buf.str(), coverage);
}

std::size_t estimate_units(std::string_view text) {
    std::size_t code_points = 0;
    for (const char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++code_points;
    }
    return (code_points + 3) / 4;
}

// ---------------------------------------------------------------------------

namespace {

void append_turn(std::string& out, const DialogTurn& turn, std::string_view human_tag,
                 std::string_view robot_tag) {
    out += turn.speaker == Speaker::human ? human_tag : robot_tag;
    out += ' ';
    out += turn.text;
    out += '\n';
}

std::string render_history(std::span<const DialogTurn> history, std::string_view human_tag,
                           std::string_view robot_tag) {
    std::string out;
    for (const auto& turn : history) append_turn(out, turn, human_tag, robot_tag);
    return out;
}

std::string render_system(const CharacterCard& card, std::size_t examples_used) {
    std::string out = card.persona;
    if (examples_used == 0) return out;
    out += "\n\nExample conversations:\n";
    const std::size_t first = card.examples.size() - examples_used;
    for (std::size_t i = first; i < card.examples.size(); ++i) {
        out += '\n';
        for (const auto& turn : card.examples[i].utterances) {
            append_turn(out, turn, card.human_tag, card.robot_tag);
        }
    }
    return out;
}

std::string render_prompt(const std::string& system, std::span<const DialogTurn> history,
                          const CharacterCard& card) {
    std::string out = system;
    out += "\n\nConversation:\n";
    out += render_history(history, card.human_tag, card.robot_tag);
    out += card.robot_tag;
    return out;
}

}  // namespace

std::vector<DialogTurn> truncate_history(const std::vector<DialogTurn>& history,
                                         const PromptBudget& budget, std::size_t reserved_units,
                                         std::string_view human_tag, std::string_view robot_tag) {
    if (history.empty()) return {};
    const std::span<const DialogTurn> all(history);
    std::size_t keep = history.size();
    while (keep > 1) {
        const auto units = budget.estimate(render_history(all.last(keep), human_tag, robot_tag));
        if (reserved_units + units <= budget.max_units) break;
        --keep;
    }
    return {history.end() - static_cast<std::ptrdiff_t>(keep), history.end()};
}

Prompt build_prompt(const CharacterCard& card, const std::vector<DialogTurn>& history,
                    const PromptBudget& budget) {
    if (history.empty() || history.back().speaker != Speaker::human) {
        invalid("prompt history must end with a human turn");
    }
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].speaker == history[i - 1].speaker) invalid("prompt history speakers must alternate");
    }

    const std::span<const DialogTurn> all(history);
    for (std::size_t examples = card.examples.size() + 1; examples-- > 0;) {
        const auto system = render_system(card, examples);
        if (budget.estimate(render_prompt(system, all.last(1), card)) > budget.max_units) continue;

        std::size_t keep = history.size();
        while (keep > 1 && budget.estimate(render_prompt(system, all.last(keep), card)) > budget.max_units) {
            --keep;
        }
        Prompt prompt;
        prompt.system = system;
        prompt.history.assign(history.end() - static_cast<std::ptrdiff_t>(keep), history.end());
        prompt.text = render_prompt(system, prompt.history, card);
        prompt.stop = {"\n" + card.human_tag, card.human_tag};
        prompt.examples_used = examples;
        prompt.history_dropped = history.size() - keep;
        return prompt;
    }
    throw Error(ErrorCode::BudgetImpossible,
                "persona and latest human turn exceed the prompt budget of " +
                    std::to_string(budget.max_units) + " units");
}

}  // namespace emoscript
