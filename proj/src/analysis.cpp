#include "emoscript/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "emoscript/error.hpp"

namespace emoscript {

using nlohmann::json;

std::uint64_t ErrorConfusionMatrix::row_total(HumanErrorType human) const {
    std::uint64_t total = 0;
    for (const auto count : counts[static_cast<std::size_t>(human)]) total += count;
    return total;
}

std::uint64_t ErrorConfusionMatrix::column_total(LLMErrorType llm) const {
    std::uint64_t total = 0;
    for (const auto& row : counts) total += row[static_cast<std::size_t>(llm)];
    return total;
}

ErrorConfusionMatrix build_confusion_matrix(std::span<const ErrorAnnotation> annotations) {
    ErrorConfusionMatrix matrix;
    for (const auto& annotation : annotations) {
        ++matrix.counts[static_cast<std::size_t>(annotation.human)][static_cast<std::size_t>(annotation.llm)];
    }
    matrix.n = annotations.size();
    return matrix;
}

TwoByTwo collapse_2x2(const ErrorConfusionMatrix& matrix) {
    TwoByTwo table;
    for (auto human : kAllHumanErrors) {
        for (auto llm : kAllLLMErrors) {
            const auto count = matrix.at(human, llm);
            const bool human_error = human != HumanErrorType::NoError;
            const bool llm_error = llm != LLMErrorType::NoError;
            if (human_error && llm_error) table.a += count;
            else if (human_error) table.b += count;
            else if (llm_error) table.c += count;
            else table.d += count;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------

std::uint64_t FeedbackTally::count(Polarity polarity, const std::string& category) const {
    const auto& list = polarity == Polarity::positive ? positive : negative;
    for (const auto& [name, count] : list) {
        if (name == category) return count;
    }
    return 0;
}

FeedbackTally tally_feedback(std::span<const FeedbackLabel> labels) {
    FeedbackTally tally;
    for (const auto& label : labels) {
        auto& list = label.polarity == Polarity::positive ? tally.positive : tally.negative;
        auto it = std::find_if(list.begin(), list.end(), [&](const auto& e) { return e.first == label.category; });
        if (it == list.end()) {
            list.emplace_back(label.category, 1);
        } else {
            ++it->second;
        }
        ++(label.polarity == Polarity::positive ? tally.positive_total : tally.negative_total);
    }
    return tally;
}

std::vector<FeedbackLabel> read_feedback(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open feedback file: " + path.string());
    std::vector<FeedbackLabel> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto doc = json::parse(line);
            const auto polarity = doc.at("polarity").get<std::string>();
            if (polarity != "positive" && polarity != "negative") {
                throw Error(ErrorCode::ParseError, "polarity must be positive or negative");
            }
            labels.push_back({polarity == "positive" ? Polarity::positive : Polarity::negative,
                              doc.at("category").get<std::string>()});
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return labels;
}

// ---------------------------------------------------------------------------

json annotation_to_json(const AnnotationRecord& record) {
    return {{"session_id", record.key.session_id},
            {"index", record.key.index},
            {"human_error", to_string(record.annotation.human)},
            {"llm_error", to_string(record.annotation.llm)},
            {"annotator", record.annotator}};
}

std::vector<AnnotationRecord> read_annotations(std::istream& in) {
    std::vector<AnnotationRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto doc = json::parse(line);
            AnnotationRecord record;
            record.key.session_id = doc.at("session_id").get<std::string>();
            record.key.index = doc.at("index").get<std::size_t>();
            const auto human = parse_human_error(doc.at("human_error").get<std::string>());
            const auto llm = parse_llm_error(doc.at("llm_error").get<std::string>());
            if (!human) throw Error(ErrorCode::ParseError, "unknown human_error");
            if (!llm) throw Error(ErrorCode::ParseError, "unknown llm_error");
            record.annotation = {*human, *llm};
            record.annotator = doc.value("annotator", std::string());
            records.push_back(std::move(record));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "annotation line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError, "annotation line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open annotations: " + path.string());
    return read_annotations(in);
}

void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records) {
    for (const auto& record : records) out << annotation_to_json(record).dump() << '\n';
    if (!out) throw Error(ErrorCode::StorageError, "failed writing annotations");
}

namespace {

template <typename T>
std::optional<T> strict_majority(const std::vector<T>& votes) {
    for (const auto& candidate : votes) {
        const auto n = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), candidate));
        if (2 * n > votes.size()) return candidate;
    }
    return std::nullopt;
}

}  // namespace

MergedAnnotations majority_merge(std::span<const AnnotationRecord> records) {
    std::map<TurnKey, std::map<std::string, ErrorAnnotation>> by_turn;
    for (const auto& record : records) by_turn[record.key][record.annotator] = record.annotation;

    MergedAnnotations merged;
    for (const auto& [key, votes] : by_turn) {
        std::vector<HumanErrorType> human;
        std::vector<LLMErrorType> llm;
        for (const auto& [_, annotation] : votes) {
            human.push_back(annotation.human);
            llm.push_back(annotation.llm);
        }
        const auto h = strict_majority(human);
        const auto l = strict_majority(llm);
        if (h && l) {
            merged.resolved.emplace(key, ErrorAnnotation{*h, *l});
        } else {
            merged.unresolved.push_back(key);
        }
    }
    return merged;
}

// ---------------------------------------------------------------------------

std::vector<AnnotationSuggestion> suggest_annotations(std::span<const Turn> turns, const MappingConfig& mapping,
                                                      std::string_view human_tag, std::size_t sentence_cap) {
    std::map<std::string, std::vector<std::string>> robot_lines;
    std::vector<AnnotationSuggestion> out;
    for (const auto& turn : turns) {
        AnnotationSuggestion suggestion{{turn.session_id, turn.index}, {}};
        const auto cut = cut_at_human_turn(turn.llm_raw, human_tag);
        const std::string reply = cut ? *cut : turn.llm_raw;

        auto& previous = robot_lines[turn.session_id];
        const std::size_t window = std::min(mapping.repeat_window, previous.size());
        const std::span<const std::string> recent(previous.data() + previous.size() - window, window);
        const bool repeats = std::any_of(recent.begin(), recent.end(), [&](const std::string& line) {
            return token_set_jaccard(reply, line) >= mapping.repeat_similarity_threshold;
        });

        const auto tokens = tokenize(reply);
        const auto sentences = static_cast<std::size_t>(
            std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return !t.is_emoji(); }));

        if (cut) suggestion.flags.push_back(LLMErrorType::RespondsAsHuman);
        if (repeats) suggestion.flags.push_back(LLMErrorType::RepeatsPreviousLine);
        if (sentences > sentence_cap) suggestion.flags.push_back(LLMErrorType::ReplyTooLong);

        previous.push_back(turn.guard.guarded_text);
        out.push_back(std::move(suggestion));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string describe(const TurnKey& key) { return key.session_id + "#" + std::to_string(key.index); }

}  // namespace

AnalysisReport analyze(std::span<const Turn> turns, std::span<const AnnotationRecord> annotations,
                       const std::optional<std::vector<FeedbackLabel>>& feedback, bool yates_correction) {
    const auto merged = majority_merge(annotations);
    const std::set<TurnKey> unresolved(merged.unresolved.begin(), merged.unresolved.end());

    std::vector<ErrorAnnotation> joined;
    std::vector<std::string> missing;
    AnalysisReport report;
    report.yates_correction = yates_correction;
    for (const auto& turn : turns) {
        const TurnKey key{turn.session_id, turn.index};
        if (auto it = merged.resolved.find(key); it != merged.resolved.end()) {
            joined.push_back(it->second);
        } else if (unresolved.count(key)) {
            report.unresolved.push_back(key);
        } else {
            missing.push_back(describe(key));
        }
    }
    if (!missing.empty()) {
        std::string message = std::to_string(missing.size()) + " turn(s) have no annotation:";
        for (const auto& m : missing) message += " " + m;
        throw Error(ErrorCode::MissingAnnotations, message);
    }

    report.matrix = build_confusion_matrix(joined);
    report.collapsed = collapse_2x2(report.matrix);
    try {
        report.chi_square = chi_square_2x2(report.collapsed, yates_correction);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateTable) throw;
        report.chi_square_error = std::string(to_string(e.code())) + ": " + e.what();
    }
    if (feedback) report.feedback = tally_feedback(*feedback);
    return report;
}

std::string render_report_text(const AnalysisReport& report) {
    std::ostringstream out;
    const auto& m = report.matrix;
    out << "Human x LLM error confusion matrix (N = " << m.n << ")\n";
    out << std::left << std::setw(18) << "";
    for (auto llm : kAllLLMErrors) out << std::right << std::setw(21) << to_string(llm);
    out << std::setw(8) << "Total" << '\n';
    for (auto human : kAllHumanErrors) {
        out << std::left << std::setw(18) << to_string(human);
        for (auto llm : kAllLLMErrors) out << std::right << std::setw(21) << m.at(human, llm);
        out << std::setw(8) << m.row_total(human) << '\n';
    }
    out << std::left << std::setw(18) << "Total";
    for (auto llm : kAllLLMErrors) out << std::right << std::setw(21) << m.column_total(llm);
    out << std::setw(8) << m.n << "\n\n";

    const auto& t = report.collapsed;
    out << "Collapsed 2x2 (human error x LLM error): a=" << t.a << " b=" << t.b << " c=" << t.c << " d=" << t.d
        << " N=" << t.n() << '\n';
    if (report.chi_square) {
        out << std::setprecision(6) << "Chi-square" << (report.yates_correction ? " (Yates)" : "") << ": chi2("
            << report.chi_square->df << ", N = " << t.n() << ") = " << report.chi_square->statistic
            << ", p = " << report.chi_square->p
            << (report.chi_square->p < 0.05 ? "  (significant at 0.05)" : "  (not significant at 0.05)") << '\n';
    } else if (report.chi_square_error) {
        out << "Chi-square: not computed (" << *report.chi_square_error << ")\n";
    }
    if (!report.unresolved.empty()) {
        out << "Unresolved annotator disagreements (" << report.unresolved.size() << "):";
        for (const auto& key : report.unresolved) out << ' ' << describe(key);
        out << '\n';
    }
    if (report.feedback) {
        const auto& f = *report.feedback;
        out << "\nPositive feedback (total " << f.positive_total << ")\n";
        for (const auto& [category, count] : f.positive) out << "  " << category << ": " << count << '\n';
        out << "Negative feedback (total " << f.negative_total << ")\n";
        for (const auto& [category, count] : f.negative) out << "  " << category << ": " << count << '\n';
    }
    return out.str();
}

json report_to_json(const AnalysisReport& report) {
    json matrix = json::object();
    for (auto human : kAllHumanErrors) {
        json row = json::object();
        for (auto llm : kAllLLMErrors) row[std::string(to_string(llm))] = report.matrix.at(human, llm);
        matrix[std::string(to_string(human))] = std::move(row);
    }
    json out = {
        {"n", report.matrix.n},
        {"matrix", std::move(matrix)},
        {"collapsed", {{"a", report.collapsed.a}, {"b", report.collapsed.b}, {"c", report.collapsed.c},
                       {"d", report.collapsed.d}}},
        {"yates_correction", report.yates_correction},
    };
    if (report.chi_square) {
        out["chi_square"] = {{"statistic", report.chi_square->statistic},
                             {"p", report.chi_square->p},
                             {"df", report.chi_square->df}};
    } else {
        out["chi_square"] = nullptr;
        out["chi_square_error"] = report.chi_square_error.value_or("");
    }
    json unresolved = json::array();
    for (const auto& key : report.unresolved) unresolved.push_back({{"session_id", key.session_id}, {"index", key.index}});
    out["unresolved"] = std::move(unresolved);
    if (report.feedback) {
        auto encode = [](const auto& list) {
            json arr = json::array();
            for (const auto& [category, count] : list) arr.push_back({{"category", category}, {"count", count}});
            return arr;
        };
        out["feedback"] = {{"positive", encode(report.feedback->positive)},
                           {"negative", encode(report.feedback->negative)},
                           {"positive_total", report.feedback->positive_total},
                           {"negative_total", report.feedback->negative_total}};
    }
    return out;
}

}  // namespace emoscript
