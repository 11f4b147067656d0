#pragma once

#include <stdexcept>
#include <string>

namespace cif {

// Classifies failures so that the service can map them to HTTP statuses and
// the CLI to exit codes without string matching.
enum class ErrorKind {
    InvalidArgument,  // malformed input or parameters (HTTP 400, exit 2)
    NotFound,         // unknown dataset, feature or grid entry (HTTP 404, exit 2)
    Unprocessable,    // well-formed but not actionable, e.g. a noise point (HTTP 422, exit 2)
    Internal,         // HTTP 500, exit 3
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline constexpr const char* kNoiseSelectionMessage = "noise is not a selectable cohort";

}  // namespace cif
