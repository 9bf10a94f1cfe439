#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "evoforge/engine.hpp"
#include "evoforge/feedback/channel.hpp"
#include "evoforge/feedback/clock.hpp"
#include "evoforge/feedback/schedule.hpp"
#include "evoforge/operators/suite.hpp"
#include "evoforge/store/campaign_state.hpp"
#include "evoforge/store/event_log.hpp"

namespace evoforge::feedback {

enum class IngestOutcome { kAccepted, kOverwritten, kRejected };

std::string_view to_string(IngestOutcome outcome);

struct IngestResult {
  IngestOutcome outcome = IngestOutcome::kRejected;
  /// Set for rejections: unknown_concept, concept_closed, not_published,
  /// campaign_not_running, nothing_to_retract.
  std::string reason;
};

struct QueuedPublication {
  ConceptId concept_id;
  Timestamp due{};
};

/// One running campaign: the interaction agent around the engine. Commands
/// (start, stop, publish, votes, activation) run one at a time; readers get
/// consistent snapshots without waiting for operator calls.
class Campaign {
 public:
  /// Logs campaign_created into an empty log.
  static std::unique_ptr<Campaign> create(const CampaignId& id, const CampaignConfig& config,
                                          store::EventLog log, ops::OperatorSuite& ops,
                                          ChannelAdapter& channel, const Clock& clock);
  /// Rebuilds from an existing log; members that were never published are
  /// queued again for the slot that followed their creation.
  static std::unique_ptr<Campaign> resume(store::EventLog log, ops::OperatorSuite& ops,
                                          ChannelAdapter& channel, const Clock& clock);

  /// Initializes on first start. Error(kInvalidTransition) when running.
  void start();
  /// Cancels queued publications. Error(kInvalidTransition) unless running.
  void stop();

  /// Error(kAlreadyPublished) unless the concept is active and unpublished.
  std::size_t enqueue_for_publication(const ConceptId& id);
  /// Publishes every due queued concept in FIFO order. On ChannelFailure the
  /// failing concept and its successors stay queued.
  std::vector<ConceptId> publish_due();

  IngestResult ingest_vote(std::string_view user_ref, const ConceptId& id,
                           std::optional<VoteValue> value);
  /// Pulls votes from the channel and ingests them.
  std::vector<IngestResult> poll_channel();

  /// Runs one activation when the trigger holds (and max_iterations allows).
  std::optional<engine::IterationRecord> maybe_activate();
  /// Runs one activation unconditionally.
  engine::IterationRecord activate();

  /// publish_due, poll_channel, maybe_activate.
  void tick();

  VoterToken token_for(std::string_view user_ref) const;

  template <typename F>
  auto read(F&& f) const {
    std::shared_lock lock(state_mutex_);
    return f(state_);
  }
  store::CampaignState snapshot() const;
  std::vector<QueuedPublication> queue() const;
  std::string log_contents() const;
  const CampaignId& id() const noexcept { return id_; }
  const CampaignConfig& config() const noexcept { return config_; }
  /// Last channel failure seen by publish_due (retry hint included).
  std::optional<std::string> last_channel_error() const;

 private:
  Campaign(store::EventLog log, store::CampaignState state, ops::OperatorSuite& ops,
           ChannelAdapter& channel, const Clock& clock);

  void commit(std::vector<store::NewEvent> events);
  std::vector<ConceptId> publish_due_locked();
  std::size_t enqueue_locked(const ConceptId& id);
  std::size_t enqueue_locked(const ConceptId& id, Timestamp from);
  engine::IterationRecord activate_locked();
  IngestResult ingest_locked(const VoterToken& token, const ConceptId& id,
                             std::optional<VoteValue> value);

  mutable std::mutex command_mutex_;
  mutable std::shared_mutex state_mutex_;
  store::EventLog log_;
  store::CampaignState state_;
  CampaignId id_;
  CampaignConfig config_;
  PublishSchedule schedule_;
  ops::OperatorSuite& ops_;
  ChannelAdapter& channel_;
  const Clock& clock_;
  std::string salt_;
  std::deque<QueuedPublication> queue_;
  std::optional<std::string> last_channel_error_;
};

}  // namespace evoforge::feedback
