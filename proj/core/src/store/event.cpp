#include "evoforge/store/event.hpp"

#include <cstdio>

#include <absl/time/time.h>
#include <boost/crc.hpp>

#include "evoforge/errors.hpp"

namespace evoforge::store {

namespace {

constexpr std::string_view kChecksumKey = ",\"checksum\":\"";
// ,"checksum":"xxxxxxxx"}
constexpr std::size_t kChecksumSuffix = kChecksumKey.size() + 8 + 2;

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::kCampaignCreated, "campaign_created"},
    {EventKind::kCampaignStarted, "campaign_started"},
    {EventKind::kConceptCreated, "concept_created"},
    {EventKind::kConceptPublished, "concept_published"},
    {EventKind::kVoteRecorded, "vote_recorded"},
    {EventKind::kActivationCompleted, "activation_completed"},
    {EventKind::kConceptRetired, "concept_retired"},
    {EventKind::kCampaignStopped, "campaign_stopped"},
};

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

// The checksummed body: {"seq":..,"kind":..,"at":..,"payload":..}
std::string record_body(const Event& e) {
  std::string out = "{\"seq\":" + std::to_string(e.seq) + ",\"kind\":\"";
  out += to_string(e.kind);
  out += "\",\"at\":\"" + format_timestamp(e.at) + "\",\"payload\":";
  out += e.payload.dump();
  out += '}';
  return out;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string format_timestamp(Timestamp at) {
  return absl::FormatTime("%Y-%m-%dT%H:%M:%SZ",
                          absl::FromUnixSeconds(at.time_since_epoch().count()),
                          absl::UTCTimeZone());
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime("%Y-%m-%dT%H:%M:%SZ", std::string(text), absl::UTCTimeZone(), &t,
                       &err)) {
    return std::nullopt;
  }
  return Timestamp(std::chrono::seconds(absl::ToUnixSeconds(t)));
}

std::uint32_t crc32c(std::string_view data) {
  boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

std::string encode_record(const Event& event) {
  std::string body = record_body(event);
  const std::string sum = hex32(crc32c(body));
  body.pop_back();
  body += kChecksumKey;
  body += sum;
  body += "\"}\n";
  return body;
}

Event decode_record(std::string_view line, std::uint64_t expected_seq) {
  const auto seq = static_cast<std::int64_t>(expected_seq);
  if (line.size() <= kChecksumSuffix ||
      line.substr(line.size() - kChecksumSuffix, kChecksumKey.size()) != kChecksumKey ||
      line.substr(line.size() - 2) != "\"}") {
    throw CorruptLogError(seq, "record has no checksum trailer");
  }
  const std::string_view sum = line.substr(line.size() - 10, 8);
  // CRC of the body with the trailer replaced by a closing brace.
  const std::string_view body = line.substr(0, line.size() - kChecksumSuffix);
  boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> crc;
  crc.process_bytes(body.data(), body.size());
  crc.process_byte('}');
  if (hex32(crc.checksum()) != sum) throw CorruptLogError(seq, "checksum mismatch");

  Json j;
  try {
    j = Json::parse(line.begin(), line.end());
  } catch (const Json::exception& e) {
    throw CorruptLogError(seq, std::string("unparseable record: ") + e.what());
  }
  Event e;
  try {
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw CorruptLogError(seq, "unknown event kind");
    e.kind = *kind;
    const auto at = parse_timestamp(j.at("at").get<std::string>());
    if (!at) throw CorruptLogError(seq, "bad timestamp");
    e.at = *at;
    e.payload = std::move(j.at("payload"));
  } catch (const Json::exception& ex) {
    throw CorruptLogError(seq, std::string("bad record shape: ") + ex.what());
  }
  if (e.seq != expected_seq) {
    throw CorruptLogError(seq, "expected seq " + std::to_string(expected_seq) + ", found " +
                                   std::to_string(e.seq));
  }
  return e;
}

std::string_view to_string(VoteOutcome outcome) {
  return outcome == VoteOutcome::kAccepted ? "accepted" : "overwritten";
}

void to_json(Json& j, const PublicationReceipt& r) {
  j = Json{{"message_ids", r.message_ids},
           {"poll_message_id", r.poll_message_id},
           {"poll_id", r.poll_id}};
}

void from_json(const Json& j, PublicationReceipt& r) {
  r.message_ids = j.at("message_ids").get<std::vector<std::string>>();
  r.poll_message_id = j.at("poll_message_id").get<std::string>();
  r.poll_id = j.at("poll_id").get<std::string>();
}

Json campaign_created_payload(const CampaignId& id, const CampaignConfig& config) {
  return Json{{"campaign_id", id.str()}, {"config", config_to_json(config)}};
}

Json concept_created_payload(const GameConcept& concept_) {
  return Json{{"concept", concept_}};
}

Json concept_published_payload(const ConceptId& id, const PublicationReceipt& receipt) {
  return Json{{"concept_id", id.str()}, {"receipt", receipt}};
}

Json vote_recorded_payload(const ConceptId& id, const VoterToken& voter,
                           std::optional<VoteValue> value, VoteOutcome outcome) {
  return Json{{"concept_id", id.str()},
              {"voter_token", voter.str()},
              {"value", value ? Json(to_int(*value)) : Json(nullptr)},
              {"outcome", to_string(outcome)}};
}

Json activation_completed_payload(const engine::IterationRecord& record,
                                  const PopulationState& state) {
  return Json{{"record", record}, {"population", state}};
}

Json concept_retired_payload(const ConceptId& id) { return Json{{"concept_id", id.str()}}; }

Json campaign_started_payload(const PopulationState& state) {
  return Json{{"population", state}};
}

Json campaign_stopped_payload(std::size_t cancelled_publications) {
  return Json{{"cancelled_publications", cancelled_publications}};
}

}  // namespace evoforge::store
