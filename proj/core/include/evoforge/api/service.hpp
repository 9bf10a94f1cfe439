#pragma once

// REST interface over a CampaignRegistry. Routing is transport independent
// (ApiRequest -> ApiResponse) so handlers can be exercised without sockets;
// ApiServer binds it to HTTP.

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "evoforge/api/registry.hpp"
#include "evoforge/serialization.hpp"

namespace evoforge::api {

inline constexpr std::string_view kSessionCookie = "evoforge_session";
inline constexpr std::string_view kSessionHeader = "X-Voter-Token";
inline constexpr std::string_view kAdminHeader = "X-Admin-Token";

struct ApiRequest {
  std::string method;
  std::string path;
  /// Header names are matched case-insensitively.
  std::map<std::string, std::string> headers;
  std::map<std::string, std::string> query;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
};

struct ApiResponse {
  int status = 200;
  Json body;
  std::map<std::string, std::string> headers;
};

/// Session tokens are opaque: 16 to 128 characters of [A-Za-z0-9_-].
bool valid_session_token(std::string_view token);
std::string new_session_token();
/// Value of `name` in a Cookie header.
std::optional<std::string> cookie_value(std::string_view cookie_header, std::string_view name);

struct ServiceOptions {
  /// Expected X-Admin-Token value; admin routes answer 401 when empty.
  std::string admin_token;
  /// Bucket width of the stats timeline.
  std::chrono::seconds timeline_bucket{3600};
};

/// Routes:
///   GET  /campaigns/{id}/concepts[?limit=&offset=]
///   POST /concepts/{id}/evaluations        {"value": -1|0|1|null}
///   GET  /campaigns/{id}/stats
///   POST /admin/campaigns                  CampaignConfig [+ "campaign_id"]
///   POST /admin/campaigns/{id}/start
///   POST /admin/campaigns/{id}/stop
/// Errors answer {"error": code, "message": text}.
class ApiService {
 public:
  ApiService(CampaignRegistry& registry, ServiceOptions options);

  ApiResponse handle(const ApiRequest& request);

 private:
  struct Session {
    std::string token;
    bool issued = false;
  };
  Session session_of(const ApiRequest& request) const;
  ApiResponse list_concepts(const ApiRequest& request, const std::string& campaign_id);
  ApiResponse submit_evaluation(const ApiRequest& request, const std::string& concept_id);
  ApiResponse stats(const std::string& campaign_id);
  ApiResponse admin_create(const ApiRequest& request);
  ApiResponse admin_transition(const std::string& campaign_id, bool start);
  bool admin_ok(const ApiRequest& request) const;

  struct CachedStats {
    std::uint64_t last_seq = 0;
    Json body;
  };

  CampaignRegistry& registry_;
  ServiceOptions options_;
  std::mutex stats_mutex_;
  std::map<CampaignId, CachedStats> stats_cache_;
};

/// User reference under which a web session votes; hashed into a voter token
/// by the campaign, so responses never expose it.
std::string session_user_ref(std::string_view token);

/// Serves an ApiService over HTTP on a background thread.
class ApiServer {
 public:
  explicit ApiServer(ApiService& service);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and starts listening; port 0 picks a free port. Returns the port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evoforge::api
