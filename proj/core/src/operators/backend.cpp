#include "evoforge/operators/backend.hpp"

#include <thread>

#include "evoforge/errors.hpp"

namespace evoforge::ops {

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kInit: return "init";
    case OperatorKind::kCrossover: return "crossover";
    case OperatorKind::kMutation: return "mutation";
  }
  return "init";
}

BackendProfile profile_from_settings(const BackendSettings& settings) {
  return BackendProfile{settings.name,  settings.base_url,    settings.endpoint_path,
                        settings.model, settings.api_key_env, settings.retry,
                        settings.timeout};
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionResult complete(CompletionBackend& backend, CompletionRequest request,
                          const Sleeper& sleep) {
  const RetryPolicy& retry = backend.profile().retry;
  const int max_attempts = std::max(1, retry.max_attempts);
  std::string last_error;
  bool last_was_timeout = false;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      if (auto delay = retry.delay_before(attempt); delay.count() > 0 && sleep) sleep(delay);
    }
    request.attempt = attempt;
    try {
      return CompletionResult{backend.attempt(request), attempt};
    } catch (const TransientBackendError& e) {
      last_error = e.what();
      last_was_timeout = false;
    } catch (const BackendTimeout& e) {
      last_error = e.what();
      last_was_timeout = true;
    }
  }
  const std::string message = backend.profile().name + ": giving up after " +
                              std::to_string(max_attempts) + " attempts: " + last_error;
  throw Error(last_was_timeout ? ErrorCode::kTimeout : ErrorCode::kBackendFailure, message);
}

}  // namespace evoforge::ops
