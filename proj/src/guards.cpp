#include <algorithm>
#include <set>

#include "emoscript/behavior.hpp"
#include "emoscript/unicode.hpp"

namespace emoscript {

namespace {

std::string_view rtrim(std::string_view text) {
    std::size_t end = text.size();
    while (end > 0 && unicode::is_ascii_space(text[end - 1])) --end;
    return text.substr(0, end);
}

std::set<std::string> word_set(std::string_view text) {
    auto words = normalize_words(text);
    return {std::make_move_iterator(words.begin()), std::make_move_iterator(words.end())};
}

}  // namespace

double token_set_jaccard(std::string_view a, std::string_view b) {
    const auto left = word_set(a);
    const auto right = word_set(b);
    if (left.empty() || right.empty()) return 0.0;
    std::size_t shared = 0;
    for (const auto& word : left) shared += right.count(word);
    const std::size_t joined = left.size() + right.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(joined);
}

std::optional<std::string> cut_at_human_turn(std::string_view text, std::string_view human_tag) {
    if (human_tag.empty()) return std::nullopt;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t content = line_start;
        while (content < text.size() && text[content] != '\n' && unicode::is_ascii_space(text[content])) {
            ++content;
        }
        if (text.substr(content).starts_with(human_tag)) {
            return std::string(rtrim(text.substr(0, line_start)));
        }
        const auto newline = text.find('\n', line_start);
        if (newline == std::string_view::npos) break;
        line_start = newline + 1;
    }
    return std::nullopt;
}

GuardReport apply_guards(std::string_view text, std::span<const std::string> robot_history,
                         std::string_view human_tag, const MappingConfig& config) {
    GuardReport report;

    if (auto cut = cut_at_human_turn(text, human_tag)) {
        report.stripped_human_turn = true;
        report.guarded_text = std::move(*cut);
    } else {
        report.guarded_text = std::string(rtrim(text));
    }

    const std::size_t window = std::min(config.repeat_window, robot_history.size());
    for (const auto& previous : robot_history.last(window)) {
        if (token_set_jaccard(report.guarded_text, previous) >= config.repeat_similarity_threshold) {
            report.repeated_previous_line = true;
            break;
        }
    }

    if (config.max_sentences_per_response) {
        const std::size_t cap = *config.max_sentences_per_response;
        std::size_t sentences = 0;
        for (const auto& span : tokenize_spans(report.guarded_text)) {
            if (span.token.is_emoji()) continue;
            if (++sentences > cap) {
                report.guarded_text = std::string(rtrim(std::string_view(report.guarded_text).substr(0, span.begin)));
                report.truncated_for_length = true;
                break;
            }
        }
    }
    return report;
}

}  // namespace emoscript
