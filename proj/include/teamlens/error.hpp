#pragma once

#include <stdexcept>
#include <string>

namespace teamlens {

// Every rejection the engine can produce, by name. Validators and loaders
// throw Error with one of these codes; the CLI prints the code name so
// failures are grep-able.
enum class ErrorCode {
    MissingField,
    DuplicateWearer,
    BadCategoryMap,
    NonMonotonicTimestamps,
    EmptyStream,
    TooFewSamples,
    AllInvalid,
    FrameMissing,
    PointOutOfBounds,
    RleUnderflow,
    RleOverflow,
    UnknownObjectId,
    DegenerateBox,
    DuplicatePersonBox,
    MissingFaceTracks,
    BadRecord,
    AdapterUnreachable,
    MalformedResponse,
    NoLeaderUtterances,
    IncompleteSession,
    InfeasibleScript,
    SessionMismatch,
    MissingAnalysis,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const { return code_; }
    const std::string& detail() const { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

} // namespace teamlens
