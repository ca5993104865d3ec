#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace emoscript {

// Errors in the input reaching the LLM.
enum class HumanErrorType { ASR, NoInputCaptured, NoError };

// Errors in the LLM output.
enum class LLMErrorType {
    EthicalViolation,
    Hallucination,
    IgnoresHumanQuestion,
    RespondsAsHuman,
    Misunderstood,
    RepeatsPreviousLine,
    ReplyTooLong,
    NoError,
};

inline constexpr std::array<HumanErrorType, 3> kAllHumanErrors = {
    HumanErrorType::ASR, HumanErrorType::NoInputCaptured, HumanErrorType::NoError};

inline constexpr std::array<LLMErrorType, 8> kAllLLMErrors = {
    LLMErrorType::EthicalViolation, LLMErrorType::Hallucination,
    LLMErrorType::IgnoresHumanQuestion, LLMErrorType::RespondsAsHuman,
    LLMErrorType::Misunderstood, LLMErrorType::RepeatsPreviousLine,
    LLMErrorType::ReplyTooLong, LLMErrorType::NoError};

std::string_view to_string(HumanErrorType type);
std::string_view to_string(LLMErrorType type);
std::optional<HumanErrorType> parse_human_error(std::string_view name);
std::optional<LLMErrorType> parse_llm_error(std::string_view name);

struct ErrorAnnotation {
    HumanErrorType human = HumanErrorType::NoError;
    LLMErrorType llm = LLMErrorType::NoError;

    bool operator==(const ErrorAnnotation&) const = default;
};

}  // namespace emoscript
