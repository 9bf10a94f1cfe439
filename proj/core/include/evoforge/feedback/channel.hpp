#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/store/campaign_state.hpp"
#include "evoforge/store/event.hpp"

namespace evoforge::feedback {

struct ChannelCapabilities {
  bool publish_text = false;
  bool open_poll = false;
  bool close_poll = false;
};

/// A vote as reported by a channel. Either `concept_id` or `poll_id`
/// identifies the target; `value` nullopt is a retraction.
struct InboundVote {
  std::string user_ref;
  std::optional<ConceptId> concept_id;
  std::string poll_id;
  std::optional<VoteValue> value;
};

struct PollHandle {
  std::string poll_message_id;
  std::string poll_id;
};

/// Publication destination. Adapters hold only destination settings and
/// transport cursors; campaign state lives in the event log. Transport errors
/// surface as ChannelFailure.
class ChannelAdapter {
 public:
  virtual ~ChannelAdapter() = default;

  virtual std::string name() const = 0;
  virtual ChannelCapabilities capabilities() const = 0;

  /// Sends the concept text; returns the message ids.
  virtual std::vector<std::string> publish_text(const GameConcept& concept_) = 0;
  virtual PollHandle open_poll(const GameConcept& concept_,
                               const std::vector<std::string>& message_ids);
  /// Closes evaluation and shows aggregate counts only.
  virtual void close_poll(const GameConcept& concept_, const store::PublicationReceipt& receipt,
                          const store::VoteCounts& counts);
  /// Votes received since the previous call.
  virtual std::vector<InboundVote> fetch_votes();
};

/// Caption shared by the channels, e.g. "Concept demo-004: Echo Lantern".
std::string concept_caption(const GameConcept& concept_);

/// Aggregate line shown when evaluation closes.
std::string tally_line(const GameConcept& concept_, const store::VoteCounts& counts);

}  // namespace evoforge::feedback
