#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emoscript {

enum class ErrorCode {
    ParseError,
    ValidationError,
    ConfigError,
    BudgetImpossible,
    RemoteUnavailable,
    MalformedResponse,
    AnnotationError,
    LLMUnavailable,
    LLMProtocolError,
    SessionClosed,
    SessionBusy,
    SessionNotFound,
    EmptyInput,
    StorageError,
    DegenerateTable,
    MissingAnnotations,
    InvalidInput,
    Internal,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports carries a machine-readable code; the
// service maps codes onto HTTP statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace emoscript
