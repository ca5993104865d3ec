#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "emoscript/behavior.hpp"
#include "emoscript/emotion.hpp"
#include "emoscript/error.hpp"
#include "emoscript/persona.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return EMOSCRIPT_TEST_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return EMOSCRIPT_TEST_FIXTURE_DIR; }

inline const emoscript::MappingConfig& shipped_mapping() {
    static const auto mapping = emoscript::MappingConfig::load(data_dir() / "mapping.json");
    return mapping;
}

inline const emoscript::EmotionLexicon& shipped_lexicon() {
    static const auto lexicon = emoscript::EmotionLexicon::load(data_dir() / "lexicon.json");
    return lexicon;
}

inline const emoscript::CharacterCard& shipped_card() {
    static const auto card = emoscript::load_card(data_dir() / "card.json", &shipped_mapping());
    return card;
}

// Returns the same prediction for every text.
class FixedClassifier final : public emoscript::EmotionClassifier {
public:
    explicit FixedClassifier(emoscript::EmotionPrediction prediction) : prediction_(prediction) {}
    emoscript::EmotionPrediction classify(std::string_view) const override { return prediction_; }

private:
    emoscript::EmotionPrediction prediction_;
};

class FailingClassifier final : public emoscript::EmotionClassifier {
public:
    emoscript::EmotionPrediction classify(std::string_view) const override {
        throw emoscript::Error(emoscript::ErrorCode::RemoteUnavailable, "classifier offline");
    }
};

// Throws `fn`'s Error and returns its code; fails the test otherwise.
template <typename Fn>
emoscript::ErrorCode error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const emoscript::Error& e) {
        return e.code();
    }
    return emoscript::ErrorCode::Internal;
}

inline std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "emoscript-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace testing
