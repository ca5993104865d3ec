#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emoscript {

enum class EmotionLabel { anger, disgust, fear, joy, sadness, surprise, neutral };

// Enumeration order doubles as the lexicon tie-break order.
inline constexpr std::array<EmotionLabel, 7> kAllEmotions = {
    EmotionLabel::anger, EmotionLabel::disgust, EmotionLabel::fear,    EmotionLabel::joy,
    EmotionLabel::sadness, EmotionLabel::surprise, EmotionLabel::neutral};

std::string_view to_string(EmotionLabel label);
std::optional<EmotionLabel> parse_emotion(std::string_view name);

struct EmotionPrediction {
    EmotionLabel label = EmotionLabel::neutral;
    double confidence = 1.0;

    bool operator==(const EmotionPrediction&) const = default;
};

// Interface every text emotion recognizer satisfies. Implementations return
// exactly one prediction with confidence in [0, 1] or throw emoscript::Error
// with RemoteUnavailable / MalformedResponse.
class EmotionClassifier {
public:
    virtual ~EmotionClassifier() = default;
    virtual EmotionPrediction classify(std::string_view text) const = 0;
};

// Lowercases, drops apostrophes, and splits on whitespace, punctuation, and
// emoji. Used for lexicon matching and for repeat detection.
std::vector<std::string> normalize_words(std::string_view text);

class EmotionLexicon {
public:
    struct Entry {
        EmotionLabel label;
        double weight;
    };

    // Keywords are normalized with normalize_words before storage. Throws
    // ValidationError on empty keywords, non-positive weights, neutral labels
    // and duplicates.
    void add(std::string_view keyword, EmotionLabel label, double weight);

    const Entry* find(std::string_view normalized_phrase) const;
    std::size_t max_phrase_words() const { return max_words_; }
    std::size_t size() const { return entries_.size(); }

    static EmotionLexicon from_json_text(std::string_view json_text);
    static EmotionLexicon load(const std::filesystem::path& path);

private:
    std::unordered_map<std::string, Entry> entries_;
    std::size_t max_words_ = 0;
};

// Sums weights of longest, non-overlapping keyword matches per label. The
// winner is the argmax label (ties resolved by enumeration order) and the
// confidence is winner / (total + 1). No match yields neutral@1.0.
EmotionPrediction classify_lexicon(std::string_view text, const EmotionLexicon& lexicon);

class LexiconClassifier final : public EmotionClassifier {
public:
    explicit LexiconClassifier(EmotionLexicon lexicon) : lexicon_(std::move(lexicon)) {}
    EmotionPrediction classify(std::string_view text) const override {
        return classify_lexicon(text, lexicon_);
    }

private:
    EmotionLexicon lexicon_;
};

// Wire protocol: POST {"text": ...} as JSON to the endpoint URL, expecting
// {"label": <one of the 7 labels>, "confidence": <number in [0,1]>}.
EmotionPrediction classify_remote(std::string_view text, const std::string& endpoint,
                                  std::chrono::milliseconds timeout);

class RemoteClassifier final : public EmotionClassifier {
public:
    RemoteClassifier(std::string endpoint, std::chrono::milliseconds timeout)
        : endpoint_(std::move(endpoint)), timeout_(timeout) {}
    EmotionPrediction classify(std::string_view text) const override {
        return classify_remote(text, endpoint_, timeout_);
    }

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
};

// Validates a decoded {label, confidence} payload.
EmotionPrediction parse_prediction_json(std::string_view body);

}  // namespace emoscript
