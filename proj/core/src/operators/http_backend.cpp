#include "evoforge/operators/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "evoforge/errors.hpp"

namespace evoforge::ops {

namespace {

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v != nullptr && *v != '\0') {
    return std::string(v);
  }
  return std::nullopt;
}

}  // namespace

HttpChatBackend::HttpChatBackend(BackendProfile profile, EnvLookup env)
    : profile_(std::move(profile)), env_(env ? std::move(env) : EnvLookup(process_env)) {
  if (profile_.base_url.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "http backend requires backend.base_url");
  }
}

std::string HttpChatBackend::attempt(const CompletionRequest& request) {
  const auto key = env_(profile_.api_key_env);
  if (!key) {
    throw Error(ErrorCode::kAuthError,
                "credential variable " + profile_.api_key_env + " is not set");
  }

  nlohmann::json body{
      {"model", profile_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_length},
      {"seed", request.variation_seed & 0x7FFFFFFFFFFFFFFFull},
  };

  httplib::Client client(profile_.base_url);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(profile_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_bearer_token_auth(*key);

  auto response = client.Post(profile_.endpoint_path, body.dump(), "application/json");
  if (!response) {
    const auto err = response.error();
    const std::string what = httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw BackendTimeout(profile_.name + ": " + what);
    }
    throw TransientBackendError(profile_.name + ": " + what);
  }
  const int status = response->status;
  if (status == 401 || status == 403) {
    throw Error(ErrorCode::kAuthError, profile_.name + ": HTTP " + std::to_string(status));
  }
  if (status == 408 || status == 429 || status >= 500) {
    throw TransientBackendError(profile_.name + ": HTTP " + std::to_string(status));
  }
  if (status != 200) {
    throw Error(ErrorCode::kBackendFailure,
                profile_.name + ": HTTP " + std::to_string(status) + ": " + response->body);
  }
  try {
    const auto parsed = nlohmann::json::parse(response->body);
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendFailure,
                profile_.name + ": unexpected response shape: " + e.what());
  }
}

}  // namespace evoforge::ops
