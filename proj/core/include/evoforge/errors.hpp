#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace evoforge {

enum class ErrorCode {
  kInvalidConfig,
  kInvalidArgument,
  kInvalidTransition,
  // evolution engine
  kSeedCountMismatch,
  kPopulationTooSmall,
  kDegenerateOffspring,
  // operators
  kMissingInterpretationList,
  kIdenticalParents,
  kFocusNotInList,
  kMalformedResponse,
  kGenerationFailed,
  kBackendFailure,
  kTimeout,
  kAuthError,
  kInvalidTemplate,
  // persistence
  kStorageFull,
  kCorruptLog,
  kUnknownCampaign,
  kUnknownConcept,
  // publication
  kAlreadyPublished,
  kChannelFailure,
  kSimulationStalled,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the log reader; `seq` is the first record that failed validation.
class CorruptLogError : public Error {
 public:
  CorruptLogError(std::int64_t seq, const std::string& message)
      : Error(ErrorCode::kCorruptLog,
              "corrupt log at seq " + std::to_string(seq) + ": " + message),
        seq_(seq) {}

  std::int64_t seq() const noexcept { return seq_; }

 private:
  std::int64_t seq_;
};

class ChannelFailure : public Error {
 public:
  explicit ChannelFailure(const std::string& message,
                          std::chrono::seconds retry_after = std::chrono::seconds{0})
      : Error(ErrorCode::kChannelFailure, message), retry_after_(retry_after) {}

  std::chrono::seconds retry_after() const noexcept { return retry_after_; }

 private:
  std::chrono::seconds retry_after_;
};

}  // namespace evoforge
