#include "evoforge/feedback/channel.hpp"

#include "evoforge/errors.hpp"
#include "evoforge/feedback/console_channel.hpp"
#include "evoforge/text.hpp"

namespace evoforge::feedback {

PollHandle ChannelAdapter::open_poll(const GameConcept&, const std::vector<std::string>&) {
  return {};
}

void ChannelAdapter::close_poll(const GameConcept&, const store::PublicationReceipt&,
                                const store::VoteCounts&) {}

std::vector<InboundVote> ChannelAdapter::fetch_votes() { return {}; }

std::string concept_caption(const GameConcept& concept_) {
  std::string caption = "Concept " + concept_.id.str();
  if (!concept_.sections.empty() && !concept_.sections.front().text.empty()) {
    caption += ": " + concept_.sections.front().text;
  }
  return caption;
}

std::string tally_line(const GameConcept& concept_, const store::VoteCounts& counts) {
  return "Evaluation closed for " + concept_.id.str() + ": " +
         std::to_string(counts.positives) + " like it, " + std::to_string(counts.neutrals) +
         " neutral, " + std::to_string(counts.negatives) + " don't like it";
}

std::optional<InboundVote> parse_vote_line(std::string_view line) {
  std::vector<std::string_view> words;
  line = text::trim(line);
  while (!line.empty()) {
    const auto space = line.find_first_of(" \t");
    words.push_back(line.substr(0, space));
    if (space == std::string_view::npos) break;
    line = text::trim(line.substr(space));
  }
  if (words.size() != 4 || words[0] != "VOTE") return std::nullopt;
  std::optional<VoteValue> value;
  if (words[2] == "+1" || words[2] == "1") {
    value = VoteValue::kPositive;
  } else if (words[2] == "0") {
    value = VoteValue::kNeutral;
  } else if (words[2] == "-1") {
    value = VoteValue::kNegative;
  } else {
    return std::nullopt;
  }
  InboundVote vote;
  vote.concept_id = ConceptId(std::string(words[1]));
  vote.value = value;
  vote.user_ref = std::string(words[3]);
  return vote;
}

ConsoleChannel::ConsoleChannel(std::ostream& out, std::istream* in) : out_(out), in_(in) {}

std::vector<std::string> ConsoleChannel::publish_text(const GameConcept& concept_) {
  std::lock_guard lock(mutex_);
  out_ << "=== " << concept_caption(concept_) << " ===\n"
       << concept_.body << "\n"
       << "Vote with: VOTE " << concept_.id.str() << " <+1|0|-1> <your-name>\n"
       << std::flush;
  if (!out_) throw ChannelFailure("console output is not writable");
  return {"console:" + std::to_string(++sent_)};
}

void ConsoleChannel::close_poll(const GameConcept& concept_, const store::PublicationReceipt&,
                                const store::VoteCounts& counts) {
  std::lock_guard lock(mutex_);
  out_ << "=== " << tally_line(concept_, counts) << " ===\n" << std::flush;
}

void ConsoleChannel::push_line(std::string line) {
  std::lock_guard lock(mutex_);
  pending_.push_back(std::move(line));
}

std::size_t ConsoleChannel::ignored_lines() const {
  std::lock_guard lock(mutex_);
  return ignored_;
}

std::vector<InboundVote> ConsoleChannel::fetch_votes() {
  std::lock_guard lock(mutex_);
  if (in_ != nullptr) {
    std::string line;
    while (in_->rdbuf() != nullptr && in_->rdbuf()->in_avail() > 0 && std::getline(*in_, line)) {
      pending_.push_back(line);
    }
  }
  std::vector<InboundVote> out;
  for (const std::string& line : pending_) {
    if (text::trim(line).empty()) continue;
    if (auto vote = parse_vote_line(line)) {
      out.push_back(std::move(*vote));
    } else {
      ++ignored_;
    }
  }
  pending_.clear();
  return out;
}

}  // namespace evoforge::feedback
