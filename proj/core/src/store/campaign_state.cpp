#include "evoforge/store/campaign_state.hpp"

#include <algorithm>

#include "evoforge/errors.hpp"
#include "evoforge/store/event_log.hpp"
#include "evoforge/text.hpp"

namespace evoforge::store {

std::string_view to_string(Lifecycle lifecycle) {
  switch (lifecycle) {
    case Lifecycle::kNone: return "none";
    case Lifecycle::kCreated: return "created";
    case Lifecycle::kRunning: return "running";
    case Lifecycle::kStopped: return "stopped";
  }
  return "unknown";
}

VoteCounts count_votes(const VoteMap& votes) {
  VoteCounts c;
  for (const auto& [voter, value] : votes) {
    switch (value) {
      case VoteValue::kPositive: ++c.positives; break;
      case VoteValue::kNeutral: ++c.neutrals; break;
      case VoteValue::kNegative: ++c.negatives; break;
    }
  }
  return c;
}

void CampaignState::require(bool condition, const Event& event, const std::string& what) const {
  if (!condition) {
    throw CorruptLogError(static_cast<std::int64_t>(event.seq),
                          std::string(to_string(event.kind)) + ": " + what);
  }
}

void CampaignState::apply(const Event& event) {
  require(event.seq == last_seq_ + 1, event, "out of sequence");
  last_seq_ = event.seq;
  if (is_staged(event.kind)) {
    staged_.push_back(event);
    return;
  }
  if (is_commit(event.kind)) {
    std::vector<Event> group;
    group.swap(staged_);
    for (const Event& e : group) apply_now(e);
  } else {
    require(staged_.empty(), event, "interleaved with an uncommitted group");
  }
  apply_now(event);
}

void CampaignState::apply_now(const Event& event) {
  const Json& p = event.payload;
  try {
    switch (event.kind) {
      case EventKind::kCampaignCreated: {
        require(lifecycle_ == Lifecycle::kNone, event, "campaign already created");
        id_ = CampaignId(p.at("campaign_id").get<std::string>());
        config_ = config_from_json(p.at("config"));
        lifecycle_ = Lifecycle::kCreated;
        break;
      }
      case EventKind::kCampaignStarted: {
        require(lifecycle_ == Lifecycle::kCreated || lifecycle_ == Lifecycle::kStopped, event,
                "campaign is not startable");
        const auto population = p.at("population").get<PopulationState>();
        if (!initialized_) {
          require(population.members.size() == config_.population_size, event,
                  "initial population has the wrong size");
          for (const ConceptId& m : population.members) {
            require(concepts_.count(m) > 0, event, "unknown member " + m.str());
          }
          population_ = population;
          initialized_ = true;
        } else {
          require(population == population_, event, "population differs from replayed state");
        }
        lifecycle_ = Lifecycle::kRunning;
        break;
      }
      case EventKind::kConceptCreated: {
        require(lifecycle_ != Lifecycle::kNone, event, "no campaign");
        auto c = p.at("concept").get<GameConcept>();
        require(concepts_.count(c.id) == 0, event, "duplicate concept " + c.id.str());
        require(c.campaign_id == id_, event, "concept belongs to another campaign");
        require(c.status == ConceptStatus::kActiveUnpublished, event, "concept not fresh");
        for (const ConceptId& parent : c.parent_ids) {
          require(concepts_.count(parent) > 0, event, "unknown parent " + parent.str());
        }
        creation_order_.push_back(c.id);
        const ConceptId id = c.id;
        concepts_.emplace(id, std::move(c));
        break;
      }
      case EventKind::kConceptPublished: {
        const ConceptId id(p.at("concept_id").get<std::string>());
        const auto it = concepts_.find(id);
        require(it != concepts_.end(), event, "unknown concept " + id.str());
        require(it->second.status == ConceptStatus::kActiveUnpublished, event,
                "concept " + id.str() + " not publishable");
        it->second.status = ConceptStatus::kActivePublished;
        receipts_[id] = p.at("receipt").get<PublicationReceipt>();
        ever_published_.insert(id);
        break;
      }
      case EventKind::kVoteRecorded: {
        const ConceptId id(p.at("concept_id").get<std::string>());
        const VoterToken voter(p.at("voter_token").get<std::string>());
        const auto it = concepts_.find(id);
        require(it != concepts_.end(), event, "unknown concept " + id.str());
        require(it->second.status == ConceptStatus::kActivePublished, event,
                "concept " + id.str() + " is not open for votes");
        const bool first = !has_voted(id, voter);
        const std::string outcome = p.at("outcome").get<std::string>();
        require(outcome == to_string(first ? VoteOutcome::kAccepted : VoteOutcome::kOverwritten),
                event, "outcome does not match vote history");
        VoteMap& map = votes_[id];
        if (p.at("value").is_null()) {
          require(map.count(voter) > 0, event, "retraction without a vote");
          map.erase(voter);
        } else {
          const auto value = vote_value_from_int(p.at("value").get<long long>());
          require(value.has_value(), event, "vote value out of range");
          map[voter] = *value;
        }
        voters_seen_[id].insert(voter);
        if (first) {
          ++population_.evals_since_last_activation;
          accepted_votes_.push_back(AcceptedVote{event.seq, event.at, id});
        }
        break;
      }
      case EventKind::kActivationCompleted: {
        require(initialized_, event, "activation before initialization");
        const auto record = p.at("record").get<engine::IterationRecord>();
        const auto population = p.at("population").get<PopulationState>();
        require(record.iteration == population_.iteration + 1, event, "iteration skipped");
        require(population.iteration == record.iteration, event, "population iteration mismatch");
        const auto offspring = concepts_.find(record.offspring_id);
        require(offspring != concepts_.end(), event, "offspring was never created");
        const auto removed = concepts_.find(record.removed_id);
        require(removed != concepts_.end() && removed->second.status == ConceptStatus::kRetired,
                event, "removed member was not retired");
        std::vector<ConceptId> expected = population_.members;
        const auto pos = std::find(expected.begin(), expected.end(), record.removed_id);
        require(pos != expected.end(), event, "removed concept was not a member");
        expected.erase(pos);
        expected.push_back(record.offspring_id);
        require(population.members == expected, event, "membership does not follow the record");
        population_ = population;
        iterations_.push_back(record);
        break;
      }
      case EventKind::kConceptRetired: {
        const ConceptId id(p.at("concept_id").get<std::string>());
        const auto it = concepts_.find(id);
        require(it != concepts_.end(), event, "unknown concept " + id.str());
        require(can_transition(it->second.status, ConceptStatus::kRetired), event,
                "concept " + id.str() + " already retired");
        it->second.status = ConceptStatus::kRetired;
        break;
      }
      case EventKind::kCampaignStopped: {
        require(lifecycle_ == Lifecycle::kRunning, event, "campaign is not running");
        lifecycle_ = Lifecycle::kStopped;
        break;
      }
    }
  } catch (const CorruptLogError&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptLogError(static_cast<std::int64_t>(event.seq),
                          std::string(to_string(event.kind)) + ": bad payload: " + e.what());
  }
}

const GameConcept* CampaignState::find(const ConceptId& id) const {
  const auto it = concepts_.find(id);
  return it == concepts_.end() ? nullptr : &it->second;
}

const VoteMap& CampaignState::votes_for(const ConceptId& id) const {
  static const VoteMap kEmpty;
  const auto it = votes_.find(id);
  return it == votes_.end() ? kEmpty : it->second;
}

std::optional<VoteValue> CampaignState::vote_of(const ConceptId& id,
                                                const VoterToken& voter) const {
  const VoteMap& map = votes_for(id);
  const auto it = map.find(voter);
  if (it == map.end()) return std::nullopt;
  return it->second;
}

bool CampaignState::has_voted(const ConceptId& id, const VoterToken& voter) const {
  const auto it = voters_seen_.find(id);
  return it != voters_seen_.end() && it->second.count(voter) > 0;
}

engine::FitnessMap CampaignState::fitness() const {
  engine::FitnessMap out;
  for (const auto& [id, c] : concepts_) out.emplace(id, engine::compute_fitness(id, votes_for(id)));
  return out;
}

std::set<ConceptId> CampaignState::active_published() const {
  std::set<ConceptId> out;
  for (const auto& [id, c] : concepts_) {
    if (c.status == ConceptStatus::kActivePublished) out.insert(id);
  }
  return out;
}

std::vector<PublishedRow> CampaignState::query_published() const {
  std::vector<PublishedRow> out;
  for (const ConceptId& id : creation_order_) {
    if (ever_published_.count(id) == 0) continue;
    out.push_back(PublishedRow{concepts_.at(id), count_votes(votes_for(id))});
  }
  return out;
}

Json CampaignState::canonical() const {
  Json concepts = Json::array();
  for (const ConceptId& id : creation_order_) concepts.push_back(concepts_.at(id));
  Json votes = Json::object();
  for (const auto& [id, map] : votes_) {
    Json per = Json::object();
    for (const auto& [voter, value] : map) per[voter.str()] = to_int(value);
    votes[id.str()] = per;
  }
  Json receipts = Json::object();
  for (const auto& [id, r] : receipts_) receipts[id.str()] = r;
  Json iterations = Json::array();
  for (const auto& r : iterations_) iterations.push_back(r);
  return Json{{"campaign_id", id_.str()},
              {"lifecycle", to_string(lifecycle_)},
              {"initialized", initialized_},
              {"config", lifecycle_ == Lifecycle::kNone ? Json(nullptr) : config_to_json(config_)},
              {"concepts", concepts},
              {"population", population_},
              {"votes", votes},
              {"receipts", receipts},
              {"iterations", iterations},
              {"accepted_votes", accepted_votes_.size()},
              {"last_seq", last_seq_ - staged_.size()}};
}

std::string CampaignState::digest() const { return text::sha256_hex(canonical().dump()); }

CampaignState replay(std::span<const Event> events) {
  CampaignState state;
  for (const Event& e : events) state.apply(e);
  return state;
}

}  // namespace evoforge::store
