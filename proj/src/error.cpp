#include "teamlens/error.hpp"

namespace teamlens {

const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateWearer: return "DuplicateWearer";
    case ErrorCode::BadCategoryMap: return "BadCategoryMap";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::AllInvalid: return "AllInvalid";
    case ErrorCode::FrameMissing: return "FrameMissing";
    case ErrorCode::PointOutOfBounds: return "PointOutOfBounds";
    case ErrorCode::RleUnderflow: return "RleUnderflow";
    case ErrorCode::RleOverflow: return "RleOverflow";
    case ErrorCode::UnknownObjectId: return "UnknownObjectId";
    case ErrorCode::DegenerateBox: return "DegenerateBox";
    case ErrorCode::DuplicatePersonBox: return "DuplicatePersonBox";
    case ErrorCode::MissingFaceTracks: return "MissingFaceTracks";
    case ErrorCode::BadRecord: return "BadRecord";
    case ErrorCode::AdapterUnreachable: return "AdapterUnreachable";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::NoLeaderUtterances: return "NoLeaderUtterances";
    case ErrorCode::IncompleteSession: return "IncompleteSession";
    case ErrorCode::InfeasibleScript: return "InfeasibleScript";
    case ErrorCode::SessionMismatch: return "SessionMismatch";
    case ErrorCode::MissingAnalysis: return "MissingAnalysis";
    }
    return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

} // namespace teamlens
