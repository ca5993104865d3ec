#include "emoscript/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "emoscript/error.hpp"
#include "emoscript/unicode.hpp"
#include "http_endpoint.hpp"

namespace emoscript {

using nlohmann::json;

std::string_view to_string(EmotionLabel label) {
    switch (label) {
        case EmotionLabel::anger: return "anger";
        case EmotionLabel::disgust: return "disgust";
        case EmotionLabel::fear: return "fear";
        case EmotionLabel::joy: return "joy";
        case EmotionLabel::sadness: return "sadness";
        case EmotionLabel::surprise: return "surprise";
        case EmotionLabel::neutral: return "neutral";
    }
    return "neutral";
}

std::optional<EmotionLabel> parse_emotion(std::string_view name) {
    for (auto label : kAllEmotions) {
        if (to_string(label) == name) return label;
    }
    return std::nullopt;
}

namespace {

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

bool is_separator(char32_t cp) {
    if (cp < 0x80) {
        const auto c = static_cast<unsigned char>(cp);
        return std::isspace(c) || std::ispunct(c);
    }
    // General Punctuation block, NBSP, inverted marks and guillemets.
    return (cp >= 0x2000 && cp <= 0x206F) || cp == 0x00A0 || cp == 0x00A1 || cp == 0x00BF ||
           cp == 0x00AB || cp == 0x00BB || cp == 0x3000;
}

}  // namespace

std::vector<std::string> normalize_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (const auto len = unicode::emoji_cluster_length(text, pos); len > 0) {
            flush();
            pos += len;
            continue;
        }
        const std::size_t start = pos;
        const char32_t cp = unicode::decode(text, pos);
        if (is_apostrophe(cp)) continue;
        if (is_separator(cp) || unicode::is_extended_pictographic(cp) ||
            cp == unicode::kEmojiPresentation || cp == unicode::kZeroWidthJoiner) {
            flush();
            continue;
        }
        if (cp < 0x80) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(cp))));
        } else {
            current.append(text.substr(start, pos - start));
        }
    }
    flush();
    return words;
}

namespace {

std::string join_words(const std::vector<std::string>& words, std::size_t from, std::size_t count) {
    std::string out;
    for (std::size_t i = from; i < from + count; ++i) {
        if (i > from) out.push_back(' ');
        out += words[i];
    }
    return out;
}

}  // namespace

void EmotionLexicon::add(std::string_view keyword, EmotionLabel label, double weight) {
    const auto words = normalize_words(keyword);
    if (words.empty()) {
        throw Error(ErrorCode::ValidationError,
                    "lexicon keyword is empty after normalization: '" + std::string(keyword) + "'");
    }
    if (!(weight > 0.0)) {
        throw Error(ErrorCode::ValidationError,
                    "lexicon weight must be positive for '" + std::string(keyword) + "'");
    }
    if (label == EmotionLabel::neutral) {
        throw Error(ErrorCode::ValidationError,
                    "lexicon keyword may not map to neutral: '" + std::string(keyword) + "'");
    }
    auto phrase = join_words(words, 0, words.size());
    if (!entries_.emplace(phrase, Entry{label, weight}).second) {
        throw Error(ErrorCode::ValidationError, "duplicate lexicon keyword: '" + phrase + "'");
    }
    max_words_ = std::max(max_words_, words.size());
}

const EmotionLexicon::Entry* EmotionLexicon::find(std::string_view normalized_phrase) const {
    const auto it = entries_.find(std::string(normalized_phrase));
    return it == entries_.end() ? nullptr : &it->second;
}

EmotionLexicon EmotionLexicon::from_json_text(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("lexicon: ") + e.what());
    }
    EmotionLexicon lexicon;
    try {
        for (const auto& item : doc.at("entries")) {
            const auto label_name = item.at("label").get<std::string>();
            const auto label = parse_emotion(label_name);
            if (!label) {
                throw Error(ErrorCode::ValidationError, "lexicon: unknown label '" + label_name + "'");
            }
            lexicon.add(item.at("keyword").get<std::string>(), *label, item.at("weight").get<double>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("lexicon: ") + e.what());
    }
    return lexicon;
}

EmotionLexicon EmotionLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open lexicon file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

EmotionPrediction classify_lexicon(std::string_view text, const EmotionLexicon& lexicon) {
    const auto words = normalize_words(text);
    std::array<double, kAllEmotions.size()> scores{};
    double total = 0.0;

    std::size_t i = 0;
    while (i < words.size()) {
        const std::size_t longest = std::min(lexicon.max_phrase_words(), words.size() - i);
        std::size_t matched = 0;
        for (std::size_t len = longest; len >= 1; --len) {
            if (const auto* entry = lexicon.find(join_words(words, i, len))) {
                scores[static_cast<std::size_t>(entry->label)] += entry->weight;
                total += entry->weight;
                matched = len;
                break;
            }
        }
        i += matched > 0 ? matched : 1;
    }

    if (total <= 0.0) return {EmotionLabel::neutral, 1.0};

    std::size_t winner = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[winner]) winner = k;
    }
    const double confidence = std::clamp(scores[winner] / (total + 1.0), 0.0, 1.0);
    return {kAllEmotions[winner], confidence};
}

EmotionPrediction parse_prediction_json(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error&) {
        throw Error(ErrorCode::MalformedResponse, "classifier reply is not JSON");
    }
    if (!doc.is_object() || !doc.contains("label") || !doc.contains("confidence")) {
        throw Error(ErrorCode::MalformedResponse, "classifier reply lacks label/confidence");
    }
    const auto& label = doc["label"];
    const auto& confidence = doc["confidence"];
    if (!label.is_string()) throw Error(ErrorCode::MalformedResponse, "label is not a string");
    if (!confidence.is_number()) throw Error(ErrorCode::MalformedResponse, "confidence is not a number");
    const auto parsed = parse_emotion(label.get<std::string>());
    if (!parsed) {
        throw Error(ErrorCode::MalformedResponse, "unknown emotion label '" + label.get<std::string>() + "'");
    }
    const double value = confidence.get<double>();
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::MalformedResponse, "confidence outside [0,1]");
    }
    return {*parsed, value};
}

EmotionPrediction classify_remote(std::string_view text, const std::string& endpoint,
                                  std::chrono::milliseconds timeout) {
    const auto target = detail::parse_endpoint(endpoint, "/classify");
    httplib::Client client(target.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const json request = {{"text", std::string(text)}};
    auto result = client.Post(target.path, request.dump(), "application/json");
    if (!result) {
        throw Error(ErrorCode::RemoteUnavailable,
                    "classifier unreachable: " + httplib::to_string(result.error()));
    }
    if (result->status >= 500 || result->status == 429 || result->status == 408) {
        throw Error(ErrorCode::RemoteUnavailable,
                    "classifier returned HTTP " + std::to_string(result->status));
    }
    if (result->status != 200) {
        throw Error(ErrorCode::MalformedResponse,
                    "classifier returned HTTP " + std::to_string(result->status));
    }
    return parse_prediction_json(result->body);
}

}  // namespace emoscript
