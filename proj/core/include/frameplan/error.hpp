#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frameplan {

enum class ErrorCode {
  // environment model
  UnknownObject,
  UnknownFixture,
  IllegalState,
  OutOfBounds,
  MissingBackground,
  ParseError,
  SchemaError,
  InvalidState,
  // timeline engine
  CannotDeleteInitial,
  CannotEditInitial,
  IndexOutOfRange,
  EnvironmentMismatch,
  ChangeSetMismatch,
  ComposeMismatch,
  // llm bridge
  MissingInstructionMarker,
  MissingResponseMarker,
  UnparseableClass,
  UnparseableDelta,
  UnknownName,
  UnparseableList,
  BadChangeNeeded,
  ProviderError,
  TranscriptMissing,
  // assist
  NotManipulable,
  StaleProposal,
  // codegen
  UnsupportedFixture,
  InvalidSequence,
  UnknownPrimitive,
  ArityError,
  UnparseableCall,
  // service
  NotFound,
  RevisionConflict,
  ValidationFailed,
  BadRequest,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every engine failure surfaces as an Error carrying a machine-readable code.
/// `detail` holds the offending name, path or digest when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace frameplan
