#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/operators/parse.hpp"
#include "evoforge/operators/template.hpp"

namespace evoforge::ops {

enum class OperatorKind { kInit, kCrossover, kMutation };

std::string_view to_string(OperatorKind kind);

/// Structured description of the operator a prompt realises. Remote backends
/// only read the prompt; the mock backend answers from this instead.
struct OperatorCall {
  OperatorKind kind = OperatorKind::kInit;
  std::vector<ConceptDraft> parents;
  std::string focus;
  std::vector<SectionSpec> schema;
};

struct CompletionRequest {
  std::string prompt;
  std::size_t max_length = 1024;
  double temperature = 1.0;
  int attempt = 1;
  /// Per-generation sampling seed; HTTP backends forward it as `seed`.
  std::uint64_t variation_seed = 0;
  OperatorCall call;
};

struct BackendProfile {
  std::string name;
  std::string base_url;
  std::string endpoint_path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env;
  RetryPolicy retry;
  std::chrono::milliseconds timeout{60000};
};

BackendProfile profile_from_settings(const BackendSettings& settings);

/// A failure worth retrying (5xx, 429, connection reset).
class TransientBackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call that ran past the profile's timeout; retried like a transient error.
class BackendTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  virtual const BackendProfile& profile() const = 0;

  /// One attempt. Throws TransientBackendError or BackendTimeout for
  /// retriable failures, Error(kAuthError) or Error(kBackendFailure) for
  /// permanent ones.
  virtual std::string attempt(const CompletionRequest& request) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

struct CompletionResult {
  std::string text;
  int attempts = 0;
};

/// Calls the backend with retries per the profile's backoff schedule; never
/// more than max_attempts calls. Exhaustion raises Error(kTimeout) when the
/// last failure was a timeout, Error(kBackendFailure) otherwise. Auth errors
/// are not retried.
CompletionResult complete(CompletionBackend& backend, CompletionRequest request,
                          const Sleeper& sleep = real_sleeper());

}  // namespace evoforge::ops
