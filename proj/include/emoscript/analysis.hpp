#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emoscript/session.hpp"
#include "emoscript/taxonomy.hpp"

namespace emoscript {

// ---------------------------------------------------------------------------
// Confusion matrix of human vs. LLM error types

struct ErrorConfusionMatrix {
    std::array<std::array<std::uint64_t, kAllLLMErrors.size()>, kAllHumanErrors.size()> counts{};
    std::uint64_t n = 0;

    std::uint64_t at(HumanErrorType human, LLMErrorType llm) const {
        return counts[static_cast<std::size_t>(human)][static_cast<std::size_t>(llm)];
    }
    std::uint64_t row_total(HumanErrorType human) const;
    std::uint64_t column_total(LLMErrorType llm) const;
};

ErrorConfusionMatrix build_confusion_matrix(std::span<const ErrorAnnotation> annotations);

// Any-error vs. no-error collapse.
//   a: human error and LLM error     b: human error, no LLM error
//   c: no human error, LLM error     d: neither
struct TwoByTwo {
    std::uint64_t a = 0, b = 0, c = 0, d = 0;

    std::uint64_t n() const { return a + b + c + d; }
    bool operator==(const TwoByTwo&) const = default;
};

TwoByTwo collapse_2x2(const ErrorConfusionMatrix& matrix);

struct ChiSquareResult {
    double statistic = 0.0;
    double p = 1.0;
    int df = 1;
};

// Pearson chi-square test of independence for a 2x2 table. Yates'
// continuity correction is off unless requested. Throws DegenerateTable when
// any row or column marginal is zero.
ChiSquareResult chi_square_2x2(const TwoByTwo& table, bool yates_correction = false);

// Q(a, x) = Gamma(a, x) / Gamma(a), the regularized upper incomplete gamma.
double regularized_gamma_q(double a, double x);

// P(X >= statistic) for X ~ chi-square(df).
double chi_square_survival(double statistic, double df);

// ---------------------------------------------------------------------------
// Feedback tallies

enum class Polarity { positive, negative };

struct FeedbackLabel {
    Polarity polarity = Polarity::positive;
    std::string category;
};

struct FeedbackTally {
    // Categories in first-seen order.
    std::vector<std::pair<std::string, std::uint64_t>> positive;
    std::vector<std::pair<std::string, std::uint64_t>> negative;
    std::uint64_t positive_total = 0;
    std::uint64_t negative_total = 0;

    std::uint64_t count(Polarity polarity, const std::string& category) const;
};

FeedbackTally tally_feedback(std::span<const FeedbackLabel> labels);

// JSONL of {polarity: "positive"|"negative", category}.
std::vector<FeedbackLabel> read_feedback(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Annotation side-car files

struct TurnKey {
    std::string session_id;
    std::size_t index = 0;

    auto operator<=>(const TurnKey&) const = default;
};

struct AnnotationRecord {
    TurnKey key;
    ErrorAnnotation annotation;
    std::string annotator;
};

// JSONL of {session_id, index, human_error, llm_error, annotator}.
nlohmann::json annotation_to_json(const AnnotationRecord& record);
std::vector<AnnotationRecord> read_annotations(std::istream& in);
std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records);

struct MergedAnnotations {
    std::map<TurnKey, ErrorAnnotation> resolved;
    // Turns where either field has no strict majority.
    std::vector<TurnKey> unresolved;
};

// Per turn and per field, keeps the label chosen by a strict majority of the
// annotators who labelled that turn. A later record from the same annotator
// replaces an earlier one.
MergedAnnotations majority_merge(std::span<const AnnotationRecord> records);

// ---------------------------------------------------------------------------
// Annotation suggestions

struct AnnotationSuggestion {
    TurnKey key;
    std::vector<LLMErrorType> flags;
};

// Flags RespondsAsHuman when llm_raw contains a human-tag line,
// RepeatsPreviousLine when the reply is similar to one of the previous robot
// lines, and ReplyTooLong when the reply has more than `sentence_cap`
// sentences. Suggestions only.
std::vector<AnnotationSuggestion> suggest_annotations(std::span<const Turn> turns, const MappingConfig& mapping,
                                                      std::string_view human_tag, std::size_t sentence_cap);

// ---------------------------------------------------------------------------
// Report

struct AnalysisReport {
    ErrorConfusionMatrix matrix;
    TwoByTwo collapsed;
    std::optional<ChiSquareResult> chi_square;
    // Set when the chi-square test could not run.
    std::optional<std::string> chi_square_error;
    std::optional<FeedbackTally> feedback;
    std::vector<TurnKey> unresolved;
    bool yates_correction = false;
};

// Joins transcripts with merged annotations. Throws MissingAnnotations
// listing every transcript turn without a resolved annotation.
AnalysisReport analyze(std::span<const Turn> turns, std::span<const AnnotationRecord> annotations,
                       const std::optional<std::vector<FeedbackLabel>>& feedback, bool yates_correction = false);

std::string render_report_text(const AnalysisReport& report);
nlohmann::json report_to_json(const AnalysisReport& report);

}  // namespace emoscript
