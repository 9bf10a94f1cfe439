#pragma once

// Event records and their newline-delimited wire form:
//
//   {"seq":1,"kind":"campaign_created","at":"2026-01-01T09:00:00Z","payload":{...},"checksum":"1a2b3c4d"}
//
// The checksum is CRC32C (lowercase hex) over the exact bytes of the record
// without its checksum member, i.e. the line up to `,"checksum"` plus "}".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/engine.hpp"
#include "evoforge/serialization.hpp"

namespace evoforge::store {

enum class EventKind {
  kCampaignCreated,
  kCampaignStarted,
  kConceptCreated,
  kConceptPublished,
  kVoteRecorded,
  kActivationCompleted,
  kConceptRetired,
  kCampaignStopped,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view text);

struct Event {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kCampaignCreated;
  Timestamp at{};
  Json payload = Json::object();
};

/// Draft of an event before the log assigns its seq.
struct NewEvent {
  EventKind kind;
  Timestamp at;
  Json payload;
};

std::string format_timestamp(Timestamp at);
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::uint32_t crc32c(std::string_view data);

/// One record line including the trailing '\n'.
std::string encode_record(const Event& event);

/// Decodes one line (without '\n'); throws CorruptLogError(expected_seq) on a
/// checksum, shape or seq mismatch.
Event decode_record(std::string_view line, std::uint64_t expected_seq);

// Channel-side identifiers of one publication.
struct PublicationReceipt {
  std::vector<std::string> message_ids;
  std::string poll_message_id;
  std::string poll_id;
  friend bool operator==(const PublicationReceipt&, const PublicationReceipt&) = default;
};

enum class VoteOutcome { kAccepted, kOverwritten };

std::string_view to_string(VoteOutcome outcome);

// Payload builders. Each kind has a fixed payload shape.
Json campaign_created_payload(const CampaignId& id, const CampaignConfig& config);
Json concept_created_payload(const GameConcept& concept_);
Json concept_published_payload(const ConceptId& id, const PublicationReceipt& receipt);
/// `value` nullopt records a retraction.
Json vote_recorded_payload(const ConceptId& id, const VoterToken& voter,
                           std::optional<VoteValue> value, VoteOutcome outcome);
Json activation_completed_payload(const engine::IterationRecord& record,
                                  const PopulationState& state);
Json concept_retired_payload(const ConceptId& id);
Json campaign_started_payload(const PopulationState& state);
Json campaign_stopped_payload(std::size_t cancelled_publications);

void to_json(Json& j, const PublicationReceipt& r);
void from_json(const Json& j, PublicationReceipt& r);

}  // namespace evoforge::store
