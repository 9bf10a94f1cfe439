#include "evoforge/api/service.hpp"

#include <openssl/crypto.h>
#include <openssl/rand.h>

#include "evoforge/analytics/analytics.hpp"
#include "evoforge/errors.hpp"
#include "evoforge/store/campaign_state.hpp"
#include "evoforge/store/event_log.hpp"
#include "evoforge/text.hpp"

namespace evoforge::api {

namespace {

ApiResponse error_response(int status, std::string_view code, std::string message) {
  return ApiResponse{status, Json{{"error", code}, {"message", std::move(message)}}, {}};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownCampaign:
    case ErrorCode::kUnknownConcept:
      return 404;
    case ErrorCode::kInvalidTransition:
    case ErrorCode::kAlreadyPublished:
      return 409;
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidTemplate:
    case ErrorCode::kSeedCountMismatch:
    case ErrorCode::kMissingInterpretationList:
      return 400;
    case ErrorCode::kTimeout:
    case ErrorCode::kBackendFailure:
    case ErrorCode::kGenerationFailed:
    case ErrorCode::kChannelFailure:
      return 502;
    default:
      return 500;
  }
}

int status_for_rejection(std::string_view reason) {
  if (reason == "unknown_concept") return 404;
  return 409;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto slash = path.find('/', pos);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > pos) out.emplace_back(path.substr(pos, end - pos));
    if (slash == std::string_view::npos) break;
    pos = slash + 1;
  }
  return out;
}

std::optional<std::size_t> query_size(const ApiRequest& request, const std::string& key) {
  const auto it = request.query.find(key);
  if (it == request.query.end()) return std::nullopt;
  std::size_t value = 0;
  const std::string& s = it->second;
  if (s.empty() || s.size() > 9) throw Error(ErrorCode::kInvalidArgument, key + " is not a count");
  for (char c : s) {
    if (c < '0' || c > '9') throw Error(ErrorCode::kInvalidArgument, key + " is not a count");
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

Json counts_json(const store::VoteCounts& c) {
  return Json{{"positives", c.positives}, {"neutrals", c.neutrals}, {"negatives", c.negatives}};
}

}  // namespace

std::optional<std::string> ApiRequest::header(std::string_view name) const {
  const std::string wanted = text::to_lower_ascii(name);
  for (const auto& [key, value] : headers) {
    if (text::to_lower_ascii(key) == wanted) return value;
  }
  return std::nullopt;
}

bool valid_session_token(std::string_view token) {
  if (token.size() < 16 || token.size() > 128) return false;
  for (char c : token) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::string new_session_token() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof bytes) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "no randomness available for session tokens");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

std::optional<std::string> cookie_value(std::string_view header, std::string_view name) {
  while (!header.empty()) {
    const auto semi = header.find(';');
    std::string_view pair = text::trim(header.substr(0, semi));
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos && text::trim(pair.substr(0, eq)) == name) {
      return std::string(text::trim(pair.substr(eq + 1)));
    }
    if (semi == std::string_view::npos) break;
    header.remove_prefix(semi + 1);
  }
  return std::nullopt;
}

std::string session_user_ref(std::string_view token) { return "session:" + std::string(token); }

ApiService::ApiService(CampaignRegistry& registry, ServiceOptions options)
    : registry_(registry), options_(std::move(options)) {}

ApiService::Session ApiService::session_of(const ApiRequest& request) const {
  if (auto h = request.header(kSessionHeader); h && valid_session_token(*h)) return {*h, false};
  if (auto cookie = request.header("Cookie")) {
    if (auto v = cookie_value(*cookie, kSessionCookie); v && valid_session_token(*v)) {
      return {*v, false};
    }
  }
  return {new_session_token(), true};
}

bool ApiService::admin_ok(const ApiRequest& request) const {
  if (options_.admin_token.empty()) return false;
  const auto given = request.header(kAdminHeader);
  if (!given || given->size() != options_.admin_token.size()) return false;
  return CRYPTO_memcmp(given->data(), options_.admin_token.data(), given->size()) == 0;
}

ApiResponse ApiService::handle(const ApiRequest& request) {
  const std::vector<std::string> parts = split_path(request.path);
  const std::string& method = request.method;
  try {
    if (method == "GET" && parts.size() == 3 && parts[0] == "campaigns" &&
        parts[2] == "concepts") {
      return list_concepts(request, parts[1]);
    }
    if (method == "GET" && parts.size() == 3 && parts[0] == "campaigns" && parts[2] == "stats") {
      return stats(parts[1]);
    }
    if (method == "POST" && parts.size() == 3 && parts[0] == "concepts" &&
        parts[2] == "evaluations") {
      return submit_evaluation(request, parts[1]);
    }
    if (method == "POST" && !parts.empty() && parts[0] == "admin") {
      if (!admin_ok(request)) {
        return error_response(401, "unauthorized", "missing or wrong X-Admin-Token");
      }
      if (parts.size() == 2 && parts[1] == "campaigns") return admin_create(request);
      if (parts.size() == 4 && parts[1] == "campaigns" &&
          (parts[3] == "start" || parts[3] == "stop")) {
        return admin_transition(parts[2], parts[3] == "start");
      }
    }
    return error_response(404, "not_found", "no route for " + method + " " + request.path);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

ApiResponse ApiService::list_concepts(const ApiRequest& request, const std::string& campaign_id) {
  feedback::Campaign* campaign = registry_.find(CampaignId(campaign_id));
  if (campaign == nullptr) {
    return error_response(404, "unknown_campaign", "no campaign " + campaign_id);
  }
  const Session session = session_of(request);
  const VoterToken voter = campaign->token_for(session_user_ref(session.token));
  const std::size_t offset = query_size(request, "offset").value_or(0);
  const std::size_t limit = query_size(request, "limit").value_or(SIZE_MAX);

  Json list = Json::array();
  campaign->read([&](const store::CampaignState& s) {
    const auto rows = s.query_published();
    for (std::size_t i = offset; i < rows.size() && list.size() < limit; ++i) {
      const GameConcept& c = rows[i].concept_;
      Json sections = Json::array();
      for (const Section& sec : c.sections) {
        sections.push_back(Json{{"label", sec.label}, {"text", sec.text}});
      }
      const auto mine = s.vote_of(c.id, voter);
      list.push_back(Json{
          {"concept_id", c.id.str()},
          {"sections", sections},
          {"status", to_string(c.status)},
          {"aggregates", s.has_voted(c.id, voter) ? counts_json(rows[i].counts) : Json(nullptr)},
          {"my_vote", mine ? Json(to_int(*mine)) : Json(nullptr)}});
    }
    return 0;
  });
  ApiResponse response{200, std::move(list), {}};
  if (session.issued) {
    response.headers["Set-Cookie"] = std::string(kSessionCookie) + "=" + session.token +
                                     "; Path=/; HttpOnly; SameSite=Lax; Max-Age=31536000";
    response.headers[std::string(kSessionHeader)] = session.token;
  }
  return response;
}

ApiResponse ApiService::submit_evaluation(const ApiRequest& request,
                                          const std::string& concept_id) {
  Json body;
  try {
    body = Json::parse(request.body);
  } catch (const Json::exception&) {
    return error_response(400, "invalid_value", "body must be a JSON object with a value");
  }
  if (!body.is_object() || !body.contains("value")) {
    return error_response(400, "invalid_value", "body must be a JSON object with a value");
  }
  const Json& v = body.at("value");
  std::optional<VoteValue> value;
  if (!v.is_null()) {
    if (!v.is_number_integer() || !(value = vote_value_from_int(v.get<long long>()))) {
      return error_response(400, "invalid_value", "value must be -1, 0, +1 or null");
    }
  }
  const ConceptId id(concept_id);
  feedback::Campaign* campaign = registry_.owner_of(id);
  if (campaign == nullptr) {
    return error_response(404, "unknown_concept", "no concept " + concept_id);
  }
  const Session session = session_of(request);
  const feedback::IngestResult result =
      campaign->ingest_vote(session_user_ref(session.token), id, value);
  if (result.outcome == feedback::IngestOutcome::kRejected) {
    return error_response(status_for_rejection(result.reason), result.reason,
                          "vote on " + concept_id + " rejected: " + result.reason);
  }
  ApiResponse response{200, Json{{"outcome", to_string(result.outcome)}}, {}};
  if (session.issued) {
    response.headers["Set-Cookie"] = std::string(kSessionCookie) + "=" + session.token +
                                     "; Path=/; HttpOnly; SameSite=Lax; Max-Age=31536000";
    response.headers[std::string(kSessionHeader)] = session.token;
  }
  return response;
}

ApiResponse ApiService::stats(const std::string& campaign_id) {
  const CampaignId id(campaign_id);
  feedback::Campaign* campaign = registry_.find(id);
  if (campaign == nullptr) {
    return error_response(404, "unknown_campaign", "no campaign " + campaign_id);
  }
  const std::uint64_t seq =
      campaign->read([](const store::CampaignState& s) { return s.last_seq(); });
  {
    std::lock_guard lock(stats_mutex_);
    const auto it = stats_cache_.find(id);
    if (it != stats_cache_.end() && it->second.last_seq == seq) return {200, it->second.body, {}};
  }
  const std::vector<store::Event> events = store::read_log(campaign->log_contents());
  const store::CampaignState state = store::replay(events);
  const auto timeline = analytics::eval_timeline(events, options_.timeline_bucket);
  const auto lengths = analytics::length_series(events);

  Json buckets = Json::array();
  for (const auto& b : timeline) {
    buckets.push_back(Json{{"bucket_start", store::format_timestamp(b.start)}, {"count", b.count}});
  }
  Json series = Json::array();
  for (std::size_t i = 0; i < lengths.raw.size(); ++i) {
    series.push_back(
        Json{{"activation", i + 1}, {"raw", lengths.raw[i]}, {"smoothed", lengths.smoothed[i]}});
  }
  Json body{{"campaign_id", campaign_id},
            {"lifecycle", to_string(state.lifecycle())},
            {"iteration", state.population().iteration},
            {"total_concepts", state.total_concepts()},
            {"total_evals", state.accepted_votes().size()},
            {"bucket_seconds", options_.timeline_bucket.count()},
            {"timeline", buckets},
            {"avg_length", series}};
  std::lock_guard lock(stats_mutex_);
  stats_cache_[id] = CachedStats{state.last_seq(), body};
  return {200, std::move(body), {}};
}

ApiResponse ApiService::admin_create(const ApiRequest& request) {
  Json body;
  try {
    body = Json::parse(request.body);
  } catch (const Json::exception& e) {
    return error_response(400, "invalid_config", std::string("body is not JSON: ") + e.what());
  }
  if (!body.is_object()) return error_response(400, "invalid_config", "body must be an object");
  const CampaignConfig config = config_from_json(body);
  if (const auto violations = validate_config(config); !violations.empty()) {
    ApiResponse r = error_response(400, "invalid_config", "campaign config has violations");
    r.body["violations"] = Json::array();
    for (const auto& v : violations) {
      r.body["violations"].push_back(Json{{"field", v.field}, {"rule", v.rule}});
    }
    return r;
  }
  const CampaignId id = body.contains("campaign_id")
                            ? CampaignId(body.at("campaign_id").get<std::string>())
                            : registry_.next_id();
  registry_.create(id, config);
  return ApiResponse{201, Json{{"campaign_id", id.str()}}, {}};
}

ApiResponse ApiService::admin_transition(const std::string& campaign_id, bool start) {
  feedback::Campaign* campaign = registry_.find(CampaignId(campaign_id));
  if (campaign == nullptr) {
    return error_response(404, "unknown_campaign", "no campaign " + campaign_id);
  }
  if (start) {
    campaign->start();
  } else {
    campaign->stop();
  }
  return ApiResponse{200, campaign->read([&](const store::CampaignState& s) {
                       return Json{{"campaign_id", campaign_id},
                                   {"lifecycle", to_string(s.lifecycle())},
                                   {"iteration", s.population().iteration},
                                   {"total_concepts", s.total_concepts()}};
                     }),
                     {}};
}

}  // namespace evoforge::api
