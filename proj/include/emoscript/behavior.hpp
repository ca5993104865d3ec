#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emoscript/emotion.hpp"

namespace emoscript {

// ---------------------------------------------------------------------------
// Tokens

struct Token {
    enum class Kind { sentence, emoji };

    Kind kind = Kind::sentence;
    std::string text;

    static Token sentence(std::string text) { return {Kind::sentence, std::move(text)}; }
    static Token emoji(std::string grapheme) { return {Kind::emoji, std::move(grapheme)}; }

    bool is_emoji() const { return kind == Kind::emoji; }
    bool operator==(const Token&) const = default;
};

// A token plus the byte range [begin, end) it was read from.
struct TokenSpan {
    Token token;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Splits text into sentences and emoji graphemes in source order. A sentence
// ends after a run of '.', '!' or '?' (plus any closing quotes or brackets)
// that is followed by whitespace, the end of the text, or an emoji, or after a
// run of two or more terminators followed directly by an uppercase letter
// ("Whoa...That"). Every emoji cluster is its own token and also ends the
// sentence in progress. Sentence text is whitespace-normalized.
std::vector<Token> tokenize(std::string_view text);
std::vector<TokenSpan> tokenize_spans(std::string_view text);

// Collapses ASCII whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

// ---------------------------------------------------------------------------
// Voice genres

enum class VoiceGenre {
    cheeky,
    default_,
    empathetic,
    high_energy,
    question,
    sad,
    serious,
    whiny,
    whisper_yell,
};

inline constexpr std::array<VoiceGenre, 9> kAllGenres = {
    VoiceGenre::cheeky, VoiceGenre::default_, VoiceGenre::empathetic,
    VoiceGenre::high_energy, VoiceGenre::question, VoiceGenre::sad,
    VoiceGenre::serious, VoiceGenre::whiny, VoiceGenre::whisper_yell};

std::string_view to_string(VoiceGenre genre);
std::optional<VoiceGenre> parse_genre(std::string_view name);

// When a question sentence also carries a confident emotion, which wins.
enum class QuestionPrecedence {
    // Question genre always wins.
    always,
    // Question genre wins for interrogative-form questions ("Can you...?",
    // "What...?"); declarative questions ("You're leaving me behind?") keep a
    // confident emotion genre and fall back to the question genre otherwise.
    interrogative,
};

// ---------------------------------------------------------------------------
// Mapping configuration

struct MappingConfig {
    // Indexed by EmotionLabel.
    std::array<VoiceGenre, kAllEmotions.size()> emotion_to_genre = {
        VoiceGenre::serious,      // anger
        VoiceGenre::whiny,        // disgust
        VoiceGenre::serious,      // fear
        VoiceGenre::high_energy,  // joy
        VoiceGenre::sad,          // sadness
        VoiceGenre::whisper_yell, // surprise
        VoiceGenre::default_,     // neutral
    };
    // Keys are emoji graphemes with variation selectors removed.
    std::map<std::string, std::vector<std::string>> emoji_to_routines;
    std::vector<std::string> routines;
    // Example emoji per emotion; character cards must cover every set.
    std::map<EmotionLabel, std::vector<std::string>> emotion_emojis;

    double confidence_threshold = 0.6;
    std::optional<std::size_t> max_actions_per_response;
    std::optional<std::size_t> max_sentences_per_response;
    double repeat_similarity_threshold = 0.9;
    std::size_t repeat_window = 3;
    QuestionPrecedence question_precedence = QuestionPrecedence::interrogative;

    VoiceGenre genre_for(EmotionLabel label) const {
        return emotion_to_genre[static_cast<std::size_t>(label)];
    }

    // Routine list for an emoji grapheme; falls back to the grapheme without
    // variation selectors, then without skin-tone modifiers.
    const std::vector<std::string>* routines_for(std::string_view emoji) const;

    bool has_routine(std::string_view routine) const;

    // Throws ValidationError naming the first violated invariant.
    void validate() const;

    static MappingConfig from_json_text(std::string_view json_text);
    static MappingConfig load(const std::filesystem::path& path);
};

// Drops U+FE0E / U+FE0F; with `drop_modifiers` also skin-tone modifiers.
std::string canonical_emoji(std::string_view grapheme, bool drop_modifiers = false);

// ---------------------------------------------------------------------------
// Selection

// Seeded source for routine choice. mt19937_64's output sequence is fixed by
// the standard, so a stored seed replays identically on every platform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform index in [0, n) by rejection sampling. n must be positive.
    std::size_t pick(std::size_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// True iff the sentence ends with '?' once trailing whitespace is trimmed.
bool detect_question(std::string_view sentence);

// True when the first word is a wh-word or an auxiliary verb.
bool opens_as_interrogative(std::string_view sentence);

VoiceGenre select_genre(std::string_view sentence, const EmotionPrediction& prediction,
                        const MappingConfig& config);

// Uniform choice from the emoji's routine list; nullopt for unmapped emoji.
std::optional<std::string> select_routine(std::string_view emoji, const MappingConfig& config,
                                          SeededRng& rng);

// ---------------------------------------------------------------------------
// Behavior scripts

struct SpeechElement {
    std::string text;
    VoiceGenre genre = VoiceGenre::default_;
    EmotionPrediction emotion;

    bool operator==(const SpeechElement&) const = default;
};

struct ActionElement {
    std::string routine;
    std::string source_emoji;

    bool operator==(const ActionElement&) const = default;
};

using ScriptElement = std::variant<SpeechElement, ActionElement>;

struct BehaviorScript {
    std::vector<ScriptElement> elements;

    std::vector<EmotionPrediction> emotion_trace() const;
    std::size_t action_count() const;
    bool operator==(const BehaviorScript&) const = default;
};

struct Annotation {
    BehaviorScript script;
    // Emoji that had no routine mapping; dropped from the script.
    std::vector<std::string> unmapped_emoji;
};

// Tokenizes, classifies every sentence, picks a genre per sentence and a
// routine per emoji (in source order, one rng draw per mapped emoji), then
// applies max_actions_per_response. Classifier failures are rethrown as
// AnnotationError.
Annotation annotate(std::string_view text, const EmotionClassifier& classifier,
                    const MappingConfig& config, SeededRng& rng);

// Classifier-free fallback: every sentence gets the default genre with a
// neutral@0 emotion; routines are chosen exactly as in annotate.
Annotation annotate_with_default_genres(std::string_view text, const MappingConfig& config,
                                        SeededRng& rng);

// ---------------------------------------------------------------------------
// Guards

struct GuardReport {
    bool stripped_human_turn = false;
    bool repeated_previous_line = false;
    bool truncated_for_length = false;
    std::string guarded_text;

    bool operator==(const GuardReport&) const = default;
};

// Jaccard similarity of the normalized word sets; 0 when either is empty.
double token_set_jaccard(std::string_view a, std::string_view b);

// Cuts `text` before the first line that begins with `human_tag`.
// Returns nullopt when no such line exists.
std::optional<std::string> cut_at_human_turn(std::string_view text, std::string_view human_tag);

// Runs, in order: the human-turn cut, the repeat check against the last
// `config.repeat_window` robot utterances, and the sentence cap.
GuardReport apply_guards(std::string_view text, std::span<const std::string> robot_history,
                         std::string_view human_tag, const MappingConfig& config);

}  // namespace emoscript
