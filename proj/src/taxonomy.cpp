#include "emoscript/taxonomy.hpp"

namespace emoscript {

std::string_view to_string(HumanErrorType type) {
    switch (type) {
        case HumanErrorType::ASR: return "ASR";
        case HumanErrorType::NoInputCaptured: return "NoInputCaptured";
        case HumanErrorType::NoError: return "NoError";
    }
    return "NoError";
}

std::string_view to_string(LLMErrorType type) {
    switch (type) {
        case LLMErrorType::EthicalViolation: return "EthicalViolation";
        case LLMErrorType::Hallucination: return "Hallucination";
        case LLMErrorType::IgnoresHumanQuestion: return "IgnoresHumanQuestion";
        case LLMErrorType::RespondsAsHuman: return "RespondsAsHuman";
        case LLMErrorType::Misunderstood: return "Misunderstood";
        case LLMErrorType::RepeatsPreviousLine: return "RepeatsPreviousLine";
        case LLMErrorType::ReplyTooLong: return "ReplyTooLong";
        case LLMErrorType::NoError: return "NoError";
    }
    return "NoError";
}

std::optional<HumanErrorType> parse_human_error(std::string_view name) {
    for (auto type : kAllHumanErrors) {
        if (to_string(type) == name) return type;
    }
    return std::nullopt;
}

std::optional<LLMErrorType> parse_llm_error(std::string_view name) {
    for (auto type : kAllLLMErrors) {
        if (to_string(type) == name) return type;
    }
    return std::nullopt;
}

}  // namespace emoscript
