#pragma once

#include <functional>
#include <optional>
#include <string>

#include "evoforge/operators/backend.hpp"

namespace evoforge::ops {

/// Chat-completion backend speaking the OpenAI-compatible wire shape:
///
///   POST {base_url}{endpoint_path}
///   {"model": ..., "messages": [{"role": "user", "content": prompt}],
///    "temperature": ..., "max_tokens": ..., "seed": ...}
///
/// The bearer credential is read from the environment variable named in the
/// profile on every attempt; it is never stored in configuration.
class HttpChatBackend final : public CompletionBackend {
 public:
  using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

  explicit HttpChatBackend(BackendProfile profile, EnvLookup env = {});

  const BackendProfile& profile() const override { return profile_; }
  std::string attempt(const CompletionRequest& request) override;

 private:
  BackendProfile profile_;
  EnvLookup env_;
};

}  // namespace evoforge::ops
