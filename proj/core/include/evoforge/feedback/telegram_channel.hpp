#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evoforge/feedback/channel.hpp"

namespace evoforge::feedback {

inline constexpr const char* kPollOptions[3] = {"I like it", "Neutral", "I don't like it"};

/// Poll option index 0/1/2 -> +1/0/-1.
std::optional<VoteValue> vote_for_option(int index);

/// Splits `text` into parts of at most `max_chars` characters including an
/// "(i/n) " prefix when more than one part is needed. Removing the prefixes
/// and concatenating the parts yields `text` again.
std::vector<std::string> chunk_message(std::string_view text, std::size_t max_chars);

/// Bot-API channel: sendMessage for the text, an anonymous three-option
/// sendPoll replying to the last part, stopPoll plus a tally when evaluation
/// closes, and getUpdates for votes.
class TelegramChannel final : public ChannelAdapter {
 public:
  using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

  /// Throws Error(kAuthError) when the token variable is unset.
  explicit TelegramChannel(const ChannelSettings& settings, EnvLookup env = {});

  std::string name() const override { return "telegram"; }
  ChannelCapabilities capabilities() const override { return {true, true, true}; }
  std::vector<std::string> publish_text(const GameConcept& concept_) override;
  PollHandle open_poll(const GameConcept& concept_,
                       const std::vector<std::string>& message_ids) override;
  void close_poll(const GameConcept& concept_, const store::PublicationReceipt& receipt,
                  const store::VoteCounts& counts) override;
  std::vector<InboundVote> fetch_votes() override;

 private:
  Json call(const std::string& method, const Json& body);

  ChannelSettings settings_;
  std::string token_;
  std::int64_t update_offset_ = 0;
  // Last option counts per anonymous poll, used to turn aggregate updates
  // into votes with reproducible synthetic voter refs.
  std::map<std::string, std::vector<std::int64_t>> poll_counts_;
};

}  // namespace evoforge::feedback
