#include "emoscript/behavior.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "emoscript/error.hpp"
#include "emoscript/unicode.hpp"

namespace emoscript {

using nlohmann::json;

std::string_view to_string(VoiceGenre genre) {
    switch (genre) {
        case VoiceGenre::cheeky: return "cheeky";
        case VoiceGenre::default_: return "default";
        case VoiceGenre::empathetic: return "empathetic";
        case VoiceGenre::high_energy: return "high_energy";
        case VoiceGenre::question: return "question";
        case VoiceGenre::sad: return "sad";
        case VoiceGenre::serious: return "serious";
        case VoiceGenre::whiny: return "whiny";
        case VoiceGenre::whisper_yell: return "whisper_yell";
    }
    return "default";
}

std::optional<VoiceGenre> parse_genre(std::string_view name) {
    for (auto genre : kAllGenres) {
        if (to_string(genre) == name) return genre;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string canonical_emoji(std::string_view grapheme, bool drop_modifiers) {
    std::string out;
    std::size_t pos = 0;
    while (pos < grapheme.size()) {
        const std::size_t start = pos;
        const char32_t cp = unicode::decode(grapheme, pos);
        if (cp == unicode::kEmojiPresentation || cp == unicode::kTextPresentation) continue;
        if (drop_modifiers && unicode::is_emoji_modifier(cp)) continue;
        out.append(grapheme.substr(start, pos - start));
    }
    return out;
}

const std::vector<std::string>* MappingConfig::routines_for(std::string_view emoji) const {
    if (auto it = emoji_to_routines.find(std::string(emoji)); it != emoji_to_routines.end()) {
        return &it->second;
    }
    if (auto it = emoji_to_routines.find(canonical_emoji(emoji)); it != emoji_to_routines.end()) {
        return &it->second;
    }
    const auto bare = canonical_emoji(emoji, true);
    if (bare.empty()) return nullptr;
    if (auto it = emoji_to_routines.find(bare); it != emoji_to_routines.end()) return &it->second;
    return nullptr;
}

bool MappingConfig::has_routine(std::string_view routine) const {
    return std::find(routines.begin(), routines.end(), routine) != routines.end();
}

void MappingConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ValidationError, what); };
    if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
        fail("confidence_threshold must lie in [0,1]");
    }
    if (!(repeat_similarity_threshold >= 0.0 && repeat_similarity_threshold <= 1.0)) {
        fail("repeat_similarity_threshold must lie in [0,1]");
    }
    if (max_actions_per_response && *max_actions_per_response == 0) {
        fail("max_actions_per_response must be positive");
    }
    if (max_sentences_per_response && *max_sentences_per_response == 0) {
        fail("max_sentences_per_response must be positive");
    }
    for (const auto& routine : routines) {
        if (routine.empty()) fail("routine registry contains an empty identifier");
    }
    for (const auto& [emoji, list] : emoji_to_routines) {
        if (list.empty()) fail("routine list for " + emoji + " is empty");
        for (const auto& routine : list) {
            if (!has_routine(routine)) {
                fail("routine '" + routine + "' for " + emoji + " is not in the registry");
            }
        }
    }
    for (const auto& [label, emojis] : emotion_emojis) {
        for (const auto& emoji : emojis) {
            if (!routines_for(emoji)) {
                fail("example emoji " + emoji + " for " + std::string(to_string(label)) +
                     " has no routine mapping");
            }
        }
    }
}

namespace {

std::optional<std::size_t> optional_count(const json& doc, const char* key) {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    const auto value = doc[key].get<long long>();
    if (value <= 0) {
        throw Error(ErrorCode::ValidationError, std::string(key) + " must be positive");
    }
    return static_cast<std::size_t>(value);
}

}  // namespace

MappingConfig MappingConfig::from_json_text(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("mapping: ") + e.what());
    }

    MappingConfig config;
    try {
        config.confidence_threshold = doc.value("confidence_threshold", config.confidence_threshold);
        config.repeat_similarity_threshold =
            doc.value("repeat_similarity_threshold", config.repeat_similarity_threshold);
        config.repeat_window = doc.value("repeat_window", config.repeat_window);
        config.max_actions_per_response = optional_count(doc, "max_actions_per_response");
        config.max_sentences_per_response = optional_count(doc, "max_sentences_per_response");

        const auto precedence = doc.value("question_precedence", std::string("interrogative"));
        if (precedence == "always") {
            config.question_precedence = QuestionPrecedence::always;
        } else if (precedence == "interrogative") {
            config.question_precedence = QuestionPrecedence::interrogative;
        } else {
            throw Error(ErrorCode::ValidationError, "unknown question_precedence '" + precedence + "'");
        }

        const auto& genres = doc.at("emotion_to_genre");
        for (auto label : kAllEmotions) {
            const auto key = std::string(to_string(label));
            if (!genres.contains(key)) {
                throw Error(ErrorCode::ValidationError, "emotion_to_genre lacks '" + key + "'");
            }
            const auto name = genres[key].get<std::string>();
            const auto genre = parse_genre(name);
            if (!genre) throw Error(ErrorCode::ValidationError, "unknown voice genre '" + name + "'");
            config.emotion_to_genre[static_cast<std::size_t>(label)] = *genre;
        }
        for (const auto& [key, _] : genres.items()) {
            if (!parse_emotion(key)) {
                throw Error(ErrorCode::ValidationError, "emotion_to_genre has unknown emotion '" + key + "'");
            }
        }

        config.routines = doc.at("routines").get<std::vector<std::string>>();
        for (const auto& [emoji, list] : doc.at("emoji_to_routines").items()) {
            config.emoji_to_routines[canonical_emoji(emoji)] = list.get<std::vector<std::string>>();
        }
        if (doc.contains("emotion_emojis")) {
            for (const auto& [key, list] : doc["emotion_emojis"].items()) {
                const auto label = parse_emotion(key);
                if (!label) {
                    throw Error(ErrorCode::ValidationError, "emotion_emojis has unknown emotion '" + key + "'");
                }
                config.emotion_emojis[*label] = list.get<std::vector<std::string>>();
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("mapping: ") + e.what());
    }
    config.validate();
    return config;
}

MappingConfig MappingConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open mapping file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

// ---------------------------------------------------------------------------

std::size_t SeededRng::pick(std::size_t n) {
    const std::uint64_t range = n;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % range + 1) % range;
    std::uint64_t draw = engine_();
    while (draw > limit) draw = engine_();
    return static_cast<std::size_t>(draw % range);
}

bool detect_question(std::string_view sentence) {
    std::size_t end = sentence.size();
    while (end > 0 && unicode::is_ascii_space(sentence[end - 1])) --end;
    return end > 0 && sentence[end - 1] == '?';
}

bool opens_as_interrogative(std::string_view sentence) {
    static constexpr std::array<std::string_view, 48> kOpeners = {
        "what", "who", "whom", "whose", "which", "where", "when", "why", "how",
        "can", "could", "will", "would", "shall", "should", "may", "might", "must",
        "do", "does", "did", "is", "are", "am", "was", "were", "have", "has", "had",
        "cant", "couldnt", "wont", "wouldnt", "shouldnt", "dont", "doesnt", "didnt",
        "isnt", "arent", "wasnt", "werent", "havent", "hasnt", "hadnt",
        "whats", "wheres", "hows", "whos"};
    const auto words = normalize_words(sentence);
    if (words.empty()) return false;
    return std::find(kOpeners.begin(), kOpeners.end(), words.front()) != kOpeners.end();
}

VoiceGenre select_genre(std::string_view sentence, const EmotionPrediction& prediction,
                        const MappingConfig& config) {
    const bool question = detect_question(sentence);
    if (question && (config.question_precedence == QuestionPrecedence::always ||
                     opens_as_interrogative(sentence))) {
        return VoiceGenre::question;
    }
    const bool confident = prediction.label != EmotionLabel::neutral &&
                           prediction.confidence >= config.confidence_threshold;
    if (confident) return config.genre_for(prediction.label);
    return question ? VoiceGenre::question : VoiceGenre::default_;
}

std::optional<std::string> select_routine(std::string_view emoji, const MappingConfig& config,
                                          SeededRng& rng) {
    const auto* list = config.routines_for(emoji);
    if (!list || list->empty()) return std::nullopt;
    return (*list)[rng.pick(list->size())];
}

// ---------------------------------------------------------------------------

std::vector<EmotionPrediction> BehaviorScript::emotion_trace() const {
    std::vector<EmotionPrediction> trace;
    for (const auto& element : elements) {
        if (const auto* speech = std::get_if<SpeechElement>(&element)) trace.push_back(speech->emotion);
    }
    return trace;
}

std::size_t BehaviorScript::action_count() const {
    return static_cast<std::size_t>(std::count_if(elements.begin(), elements.end(), [](const auto& e) {
        return std::holds_alternative<ActionElement>(e);
    }));
}

namespace {

template <typename GenreFn>
Annotation annotate_impl(std::string_view text, const MappingConfig& config, SeededRng& rng,
                         GenreFn&& speech_for) {
    Annotation result;
    std::size_t actions = 0;
    for (auto& token : tokenize(text)) {
        if (!token.is_emoji()) {
            result.script.elements.emplace_back(speech_for(std::move(token.text)));
            continue;
        }
        auto routine = select_routine(token.text, config, rng);
        if (!routine) {
            result.unmapped_emoji.push_back(std::move(token.text));
            continue;
        }
        if (config.max_actions_per_response && actions >= *config.max_actions_per_response) continue;
        ++actions;
        result.script.elements.emplace_back(ActionElement{std::move(*routine), std::move(token.text)});
    }
    return result;
}

}  // namespace

Annotation annotate(std::string_view text, const EmotionClassifier& classifier,
                    const MappingConfig& config, SeededRng& rng) {
    return annotate_impl(text, config, rng, [&](std::string sentence) {
        EmotionPrediction prediction;
        try {
            prediction = classifier.classify(sentence);
        } catch (const Error& e) {
            throw Error(ErrorCode::AnnotationError,
                        std::string("classifier failed (") + std::string(to_string(e.code())) + "): " + e.what());
        }
        if (!(prediction.confidence >= 0.0 && prediction.confidence <= 1.0)) {
            throw Error(ErrorCode::AnnotationError, "classifier confidence outside [0,1]");
        }
        const auto genre = select_genre(sentence, prediction, config);
        return SpeechElement{std::move(sentence), genre, prediction};
    });
}

Annotation annotate_with_default_genres(std::string_view text, const MappingConfig& config,
                                        SeededRng& rng) {
    return annotate_impl(text, config, rng, [](std::string sentence) {
        return SpeechElement{std::move(sentence), VoiceGenre::default_, {EmotionLabel::neutral, 0.0}};
    });
}

}  // namespace emoscript
