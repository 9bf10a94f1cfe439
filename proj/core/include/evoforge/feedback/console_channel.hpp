#pragma once

#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "evoforge/feedback/channel.hpp"

namespace evoforge::feedback {

/// Parses `VOTE <concept_id> <+1|0|-1> <user_ref>`; nullopt for anything else.
std::optional<InboundVote> parse_vote_line(std::string_view line);

/// Reference channel: concepts go to an output stream, votes come from an
/// input stream using the VOTE line protocol.
class ConsoleChannel final : public ChannelAdapter {
 public:
  /// `in` may be null when votes are injected through ingest directly.
  ConsoleChannel(std::ostream& out, std::istream* in = nullptr);

  std::string name() const override { return "console"; }
  ChannelCapabilities capabilities() const override { return {true, false, true}; }
  std::vector<std::string> publish_text(const GameConcept& concept_) override;
  void close_poll(const GameConcept& concept_, const store::PublicationReceipt& receipt,
                  const store::VoteCounts& counts) override;
  /// Reads every line currently buffered on the input stream.
  std::vector<InboundVote> fetch_votes() override;

  /// Feeds one input line from another reader thread.
  void push_line(std::string line);
  /// Number of lines seen that were not valid votes.
  std::size_t ignored_lines() const;

 private:
  std::ostream& out_;
  std::istream* in_;
  mutable std::mutex mutex_;
  std::vector<std::string> pending_;
  std::size_t ignored_ = 0;
  std::size_t sent_ = 0;
};

}  // namespace evoforge::feedback
