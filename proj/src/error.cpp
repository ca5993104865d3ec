#include "emoscript/error.hpp"

namespace emoscript {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::BudgetImpossible: return "BudgetImpossible";
        case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
        case ErrorCode::MalformedResponse: return "MalformedResponse";
        case ErrorCode::AnnotationError: return "AnnotationError";
        case ErrorCode::LLMUnavailable: return "LLMUnavailable";
        case ErrorCode::LLMProtocolError: return "LLMProtocolError";
        case ErrorCode::SessionClosed: return "SessionClosed";
        case ErrorCode::SessionBusy: return "SessionBusy";
        case ErrorCode::SessionNotFound: return "SessionNotFound";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::StorageError: return "StorageError";
        case ErrorCode::DegenerateTable: return "DegenerateTable";
        case ErrorCode::MissingAnnotations: return "MissingAnnotations";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace emoscript
