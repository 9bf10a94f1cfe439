#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/engine.hpp"
#include "evoforge/store/event.hpp"

namespace evoforge::store {

enum class Lifecycle { kNone, kCreated, kRunning, kStopped };

std::string_view to_string(Lifecycle lifecycle);

struct AcceptedVote {
  std::uint64_t seq = 0;
  Timestamp at{};
  ConceptId concept_id;
};

struct VoteCounts {
  std::size_t positives = 0;
  std::size_t neutrals = 0;
  std::size_t negatives = 0;
  std::size_t total() const { return positives + neutrals + negatives; }
  friend bool operator==(const VoteCounts&, const VoteCounts&) = default;
};

VoteCounts count_votes(const VoteMap& votes);

struct PublishedRow {
  GameConcept concept_;
  VoteCounts counts;
};

/// State of one campaign as a fold over its events. Staged events
/// (concept_created, concept_retired) are held back until their commit event,
/// so any prefix of a log replays to a consistent population.
class CampaignState {
 public:
  /// Throws CorruptLogError when an event contradicts the state so far.
  void apply(const Event& event);

  const CampaignId& id() const noexcept { return id_; }
  const CampaignConfig& config() const noexcept { return config_; }
  Lifecycle lifecycle() const noexcept { return lifecycle_; }
  bool initialized() const noexcept { return initialized_; }

  const std::map<ConceptId, GameConcept>& concepts() const noexcept { return concepts_; }
  const std::vector<ConceptId>& creation_order() const noexcept { return creation_order_; }
  const PopulationState& population() const noexcept { return population_; }
  const std::vector<engine::IterationRecord>& iterations() const noexcept {
    return iterations_;
  }
  const std::vector<AcceptedVote>& accepted_votes() const noexcept { return accepted_votes_; }
  const std::map<ConceptId, PublicationReceipt>& receipts() const noexcept { return receipts_; }
  std::uint64_t last_seq() const noexcept { return last_seq_; }

  const GameConcept* find(const ConceptId& id) const;
  const VoteMap& votes_for(const ConceptId& id) const;
  std::optional<VoteValue> vote_of(const ConceptId& id, const VoterToken& voter) const;
  /// True once `voter` has ever voted on `id` (a retraction does not reset it).
  bool has_voted(const ConceptId& id, const VoterToken& voter) const;

  engine::FitnessMap fitness() const;
  std::set<ConceptId> active_published() const;
  std::size_t total_concepts() const noexcept { return concepts_.size(); }
  /// Staged events not yet committed.
  std::size_t pending() const noexcept { return staged_.size(); }

  /// Published concepts (and retired ones that were published) with aggregate
  /// counts only.
  std::vector<PublishedRow> query_published() const;

  /// Canonical JSON of the replayed state (timestamps excluded).
  Json canonical() const;
  /// SHA-256 hex of canonical().dump().
  std::string digest() const;

 private:
  void apply_now(const Event& event);
  void require(bool condition, const Event& event, const std::string& what) const;

  CampaignId id_;
  CampaignConfig config_;
  Lifecycle lifecycle_ = Lifecycle::kNone;
  bool initialized_ = false;
  std::map<ConceptId, GameConcept> concepts_;
  std::vector<ConceptId> creation_order_;
  PopulationState population_;
  std::map<ConceptId, VoteMap> votes_;
  std::map<ConceptId, std::set<VoterToken>> voters_seen_;
  std::map<ConceptId, PublicationReceipt> receipts_;
  std::set<ConceptId> ever_published_;
  std::vector<engine::IterationRecord> iterations_;
  std::vector<AcceptedVote> accepted_votes_;
  std::vector<Event> staged_;
  std::uint64_t last_seq_ = 0;
};

/// Replays a strictly decoded event sequence.
CampaignState replay(std::span<const Event> events);

}  // namespace evoforge::store
