#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shdr {

enum class ErrorCode {
    ParseError,
    EmptyInput,
    ShortSeries,
    DegenerateChannel,
    EmbeddingTooLong,
    NoUsablePairs,
    DegenerateGeometry,
    ShapeMismatch,
    ArgumentRange,
    DisconnectedGraph,
    ConvergenceFailure,
    ConstantSeries,
    DivergedTrajectory,
    NoOrbitsFound,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Input errors are the caller's fault (bad file, bad flag); everything else
// is a numerical failure of some stage. The CLI maps these to exit codes 2/3.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// Same as Error, with the pipeline stage that raised it attached.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& inner)
        : Error(inner.code(), "[" + stage + "] " + inner.detail()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace shdr
