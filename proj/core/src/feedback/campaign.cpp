#include "evoforge/feedback/campaign.hpp"

#include <algorithm>
#include <map>

#include "evoforge/errors.hpp"
#include "evoforge/feedback/voter_token.hpp"

namespace evoforge::feedback {

std::string_view to_string(IngestOutcome outcome) {
  switch (outcome) {
    case IngestOutcome::kAccepted: return "accepted";
    case IngestOutcome::kOverwritten: return "overwritten";
    case IngestOutcome::kRejected: return "rejected";
  }
  return "rejected";
}

namespace {

IngestResult rejected(std::string reason) {
  return IngestResult{IngestOutcome::kRejected, std::move(reason)};
}

}  // namespace

Campaign::Campaign(store::EventLog log, store::CampaignState state, ops::OperatorSuite& ops,
                   ChannelAdapter& channel, const Clock& clock)
    : log_(std::move(log)),
      state_(std::move(state)),
      id_(state_.id()),
      config_(state_.config()),
      schedule_(PublishSchedule::from_config(config_)),
      ops_(ops),
      channel_(channel),
      clock_(clock),
      salt_(config_.channel.voter_salt.empty() ? "evoforge:" + id_.str()
                                               : config_.channel.voter_salt) {}

std::unique_ptr<Campaign> Campaign::create(const CampaignId& id, const CampaignConfig& config,
                                           store::EventLog log, ops::OperatorSuite& ops,
                                           ChannelAdapter& channel, const Clock& clock) {
  if (const auto violations = validate_config(config); !violations.empty()) {
    std::string message = "invalid campaign config:";
    for (const auto& v : violations) message += " " + v.field + " (" + v.rule + ");";
    throw Error(ErrorCode::kInvalidConfig, message);
  }
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "campaign id is empty");
  if (log.last_seq() != 0) {
    throw Error(ErrorCode::kInvalidArgument, "log for campaign " + id.str() + " is not empty");
  }
  // Validate the schedule before anything is written.
  PublishSchedule::from_config(config);
  log.append(store::NewEvent{store::EventKind::kCampaignCreated, clock.now(),
                             store::campaign_created_payload(id, config)});
  store::CampaignState state = store::replay(log.events());
  return std::unique_ptr<Campaign>(new Campaign(std::move(log), std::move(state), ops, channel,
                                                clock));
}

std::unique_ptr<Campaign> Campaign::resume(store::EventLog log, ops::OperatorSuite& ops,
                                           ChannelAdapter& channel, const Clock& clock) {
  store::CampaignState state = store::replay(log.events());
  if (state.lifecycle() == store::Lifecycle::kNone) {
    throw Error(ErrorCode::kUnknownCampaign, "log holds no campaign");
  }
  std::unique_ptr<Campaign> campaign(
      new Campaign(std::move(log), std::move(state), ops, channel, clock));
  if (campaign->state_.lifecycle() == store::Lifecycle::kRunning) {
    std::lock_guard lock(campaign->command_mutex_);
    // Keep the slot each concept was originally queued for, so a concept
    // that fell due while the process was down goes out right away.
    std::map<ConceptId, Timestamp> created_at;
    for (const store::Event& e : campaign->log_.events()) {
      if (e.kind == store::EventKind::kConceptCreated) {
        created_at[ConceptId(e.payload.at("concept").at("concept_id").get<std::string>())] = e.at;
      }
    }
    for (const ConceptId& id : campaign->state_.creation_order()) {
      const GameConcept* c = campaign->state_.find(id);
      if (c->status == ConceptStatus::kActiveUnpublished) {
        campaign->enqueue_locked(id, created_at.at(id));
      }
    }
  }
  return campaign;
}

void Campaign::commit(std::vector<store::NewEvent> events) {
  std::unique_lock lock(state_mutex_);
  const std::uint64_t first = log_.last_seq() + 1;
  log_.append(events);
  for (std::uint64_t seq = first; seq <= log_.last_seq(); ++seq) {
    state_.apply(log_.events()[seq - 1]);
  }
}

void Campaign::start() {
  std::lock_guard lock(command_mutex_);
  if (state_.lifecycle() == store::Lifecycle::kRunning) {
    throw Error(ErrorCode::kInvalidTransition, "campaign " + id_.str() + " is already running");
  }
  const Timestamp now = clock_.now();
  std::vector<store::NewEvent> events;
  if (!state_.initialized()) {
    const engine::Initialization init = engine::initialize_population(id_, config_, ops_);
    for (const GameConcept& c : init.concepts) {
      events.push_back({store::EventKind::kConceptCreated, now, store::concept_created_payload(c)});
    }
    events.push_back(
        {store::EventKind::kCampaignStarted, now, store::campaign_started_payload(init.state)});
  } else {
    events.push_back({store::EventKind::kCampaignStarted, now,
                      store::campaign_started_payload(state_.population())});
  }
  commit(std::move(events));
  for (const ConceptId& id : state_.population().members) {
    if (state_.find(id)->status == ConceptStatus::kActiveUnpublished) enqueue_locked(id);
  }
  if (schedule_.immediate()) publish_due_locked();
}

void Campaign::stop() {
  std::lock_guard lock(command_mutex_);
  if (state_.lifecycle() != store::Lifecycle::kRunning) {
    throw Error(ErrorCode::kInvalidTransition, "campaign " + id_.str() + " is not running");
  }
  const std::size_t cancelled = queue_.size();
  queue_.clear();
  commit({{store::EventKind::kCampaignStopped, clock_.now(),
           store::campaign_stopped_payload(cancelled)}});
}

std::size_t Campaign::enqueue_locked(const ConceptId& id) { return enqueue_locked(id, clock_.now()); }

std::size_t Campaign::enqueue_locked(const ConceptId& id, Timestamp from) {
  const GameConcept* c = state_.find(id);
  if (c == nullptr) throw Error(ErrorCode::kUnknownConcept, "unknown concept " + id.str());
  const bool queued = std::any_of(queue_.begin(), queue_.end(),
                                  [&](const QueuedPublication& q) { return q.concept_id == id; });
  if (c->status != ConceptStatus::kActiveUnpublished || queued) {
    throw Error(ErrorCode::kAlreadyPublished,
                "concept " + id.str() + " is already published or queued");
  }
  queue_.push_back(QueuedPublication{id, schedule_.next_slot(from)});
  return queue_.size() - 1;
}

std::size_t Campaign::enqueue_for_publication(const ConceptId& id) {
  std::lock_guard lock(command_mutex_);
  return enqueue_locked(id);
}

std::vector<ConceptId> Campaign::publish_due_locked() {
  std::vector<ConceptId> published;
  if (state_.lifecycle() != store::Lifecycle::kRunning) return published;
  const Timestamp now = clock_.now();
  while (!queue_.empty() && queue_.front().due <= now) {
    const ConceptId id = queue_.front().concept_id;
    const GameConcept concept_ = *state_.find(id);
    store::PublicationReceipt receipt;
    try {
      receipt.message_ids = channel_.publish_text(concept_);
      if (channel_.capabilities().open_poll) {
        const PollHandle poll = channel_.open_poll(concept_, receipt.message_ids);
        receipt.poll_message_id = poll.poll_message_id;
        receipt.poll_id = poll.poll_id;
      }
    } catch (const ChannelFailure& e) {
      last_channel_error_ = e.what();
      break;
    }
    last_channel_error_.reset();
    commit({{store::EventKind::kConceptPublished, clock_.now(),
             store::concept_published_payload(id, receipt)}});
    queue_.pop_front();
    published.push_back(id);
  }
  return published;
}

std::vector<ConceptId> Campaign::publish_due() {
  std::lock_guard lock(command_mutex_);
  return publish_due_locked();
}

VoterToken Campaign::token_for(std::string_view user_ref) const {
  return derive_voter_token(salt_, channel_.name(), user_ref);
}

IngestResult Campaign::ingest_locked(const VoterToken& token, const ConceptId& id,
                                     std::optional<VoteValue> value) {
  if (state_.lifecycle() != store::Lifecycle::kRunning) return rejected("campaign_not_running");
  const GameConcept* c = state_.find(id);
  if (c == nullptr) return rejected("unknown_concept");
  if (c->status == ConceptStatus::kRetired) return rejected("concept_closed");
  if (c->status != ConceptStatus::kActivePublished) return rejected("not_published");
  if (!value && !state_.vote_of(id, token)) return rejected("nothing_to_retract");
  const bool first = !state_.has_voted(id, token);
  const auto outcome = first ? store::VoteOutcome::kAccepted : store::VoteOutcome::kOverwritten;
  commit({{store::EventKind::kVoteRecorded, clock_.now(),
           store::vote_recorded_payload(id, token, value, outcome)}});
  return IngestResult{first ? IngestOutcome::kAccepted : IngestOutcome::kOverwritten, {}};
}

IngestResult Campaign::ingest_vote(std::string_view user_ref, const ConceptId& id,
                                   std::optional<VoteValue> value) {
  std::lock_guard lock(command_mutex_);
  return ingest_locked(token_for(user_ref), id, value);
}

std::vector<IngestResult> Campaign::poll_channel() {
  std::lock_guard lock(command_mutex_);
  std::vector<IngestResult> results;
  for (const InboundVote& vote : channel_.fetch_votes()) {
    std::optional<ConceptId> target = vote.concept_id;
    if (!target && !vote.poll_id.empty()) {
      for (const auto& [id, receipt] : state_.receipts()) {
        if (receipt.poll_id == vote.poll_id) target = id;
      }
    }
    if (!target) {
      results.push_back(rejected("unknown_concept"));
      continue;
    }
    results.push_back(ingest_locked(token_for(vote.user_ref), *target, vote.value));
  }
  return results;
}

engine::IterationRecord Campaign::activate_locked() {
  if (state_.lifecycle() != store::Lifecycle::kRunning || !state_.initialized()) {
    throw Error(ErrorCode::kInvalidTransition, "campaign " + id_.str() + " is not running");
  }
  const engine::Activation act = engine::run_iteration(
      id_, state_.population(), state_.concepts(), state_.fitness(), config_, ops_,
      state_.total_concepts() + 1);
  const ConceptId removed = act.record.removed_id;
  const GameConcept removed_before = *state_.find(removed);

  const Timestamp now = clock_.now();
  commit({{store::EventKind::kConceptCreated, now, store::concept_created_payload(act.offspring)},
          {store::EventKind::kConceptRetired, now, store::concept_retired_payload(removed)},
          {store::EventKind::kActivationCompleted, now,
           store::activation_completed_payload(act.record, act.state)}});

  queue_.erase(std::remove_if(queue_.begin(), queue_.end(),
                              [&](const QueuedPublication& q) { return q.concept_id == removed; }),
               queue_.end());
  if (removed_before.status == ConceptStatus::kActivePublished &&
      channel_.capabilities().close_poll) {
    try {
      channel_.close_poll(*state_.find(removed), state_.receipts().at(removed),
                          store::count_votes(state_.votes_for(removed)));
    } catch (const ChannelFailure& e) {
      last_channel_error_ = e.what();
    }
  }
  enqueue_locked(act.offspring.id);
  if (schedule_.immediate()) publish_due_locked();
  return act.record;
}

engine::IterationRecord Campaign::activate() {
  std::lock_guard lock(command_mutex_);
  return activate_locked();
}

std::optional<engine::IterationRecord> Campaign::maybe_activate() {
  std::lock_guard lock(command_mutex_);
  if (state_.lifecycle() != store::Lifecycle::kRunning || !state_.initialized()) {
    return std::nullopt;
  }
  if (config_.max_iterations &&
      state_.population().iteration >= static_cast<std::int64_t>(*config_.max_iterations)) {
    return std::nullopt;
  }
  if (!engine::should_activate(state_.population(), state_.active_published(), state_.fitness(),
                               config_)) {
    return std::nullopt;
  }
  return activate_locked();
}

void Campaign::tick() {
  publish_due();
  try {
    poll_channel();
  } catch (const ChannelFailure& e) {
    std::lock_guard lock(command_mutex_);
    last_channel_error_ = e.what();
  }
  maybe_activate();
}

store::CampaignState Campaign::snapshot() const {
  std::shared_lock lock(state_mutex_);
  return state_;
}

std::vector<QueuedPublication> Campaign::queue() const {
  std::lock_guard lock(command_mutex_);
  return {queue_.begin(), queue_.end()};
}

std::string Campaign::log_contents() const {
  std::shared_lock lock(state_mutex_);
  return log_.contents();
}

std::optional<std::string> Campaign::last_channel_error() const {
  std::lock_guard lock(command_mutex_);
  return last_channel_error_;
}

}  // namespace evoforge::feedback
