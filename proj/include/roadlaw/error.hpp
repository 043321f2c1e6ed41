#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace roadlaw {

/// Input data failed a structural or semantic check (bad corpus record,
/// bad mode map, out-of-range parameter, malformed config).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A line-oriented input could not be parsed. Carries the 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
          line_number(line) {}

    std::size_t line_number;
};

/// A key (mode id, doc id, statute id) was not found where it must resolve.
struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Transport-level failure talking to an LLM or embedding endpoint.
struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Retrieval could not complete; wraps the backend diagnostics.
struct RetrievalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Agent output never became schema-valid within the repair budget.
/// Keeps the last raw reply for inspection.
struct StructuredOutputError : std::runtime_error {
    StructuredOutputError(const std::string& what, std::string raw)
        : std::runtime_error(what), raw_output(std::move(raw)) {}

    std::string raw_output;
};

/// A pipeline stage aborted the case. `kind` drives the service status code
/// (backend trouble vs. everything else).
struct PipelineError : std::runtime_error {
    enum class Kind { backend, structured_output, other };

    PipelineError(const std::string& stage_name, const std::string& what, Kind k)
        : std::runtime_error("stage '" + stage_name + "': " + what),
          stage(stage_name),
          kind(k) {}

    std::string stage;
    Kind kind;
};

}  // namespace roadlaw
