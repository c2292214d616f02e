#include "frameplan/error.hpp"

namespace frameplan {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::IllegalState: return "IllegalState";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::MissingBackground: return "MissingBackground";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::CannotDeleteInitial: return "CannotDeleteInitial";
    case ErrorCode::CannotEditInitial: return "CannotEditInitial";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EnvironmentMismatch: return "EnvironmentMismatch";
    case ErrorCode::ChangeSetMismatch: return "ChangeSetMismatch";
    case ErrorCode::ComposeMismatch: return "ComposeMismatch";
    case ErrorCode::MissingInstructionMarker: return "MissingInstructionMarker";
    case ErrorCode::MissingResponseMarker: return "MissingResponseMarker";
    case ErrorCode::UnparseableClass: return "UnparseableClass";
    case ErrorCode::UnparseableDelta: return "UnparseableDelta";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::UnparseableList: return "UnparseableList";
    case ErrorCode::BadChangeNeeded: return "BadChangeNeeded";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::TranscriptMissing: return "TranscriptMissing";
    case ErrorCode::NotManipulable: return "NotManipulable";
    case ErrorCode::StaleProposal: return "StaleProposal";
    case ErrorCode::UnsupportedFixture: return "UnsupportedFixture";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::UnknownPrimitive: return "UnknownPrimitive";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::UnparseableCall: return "UnparseableCall";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::RevisionConflict: return "RevisionConflict";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string detail)
    : std::runtime_error(std::move(message)), code_(code), detail_(std::move(detail)) {}

}  // namespace frameplan
