#include "evoforge/feedback/telegram_channel.hpp"

#include <cstdlib>

#include <httplib.h>

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge::feedback {

namespace {

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v != nullptr && *v != '\0') {
    return std::string(v);
  }
  return std::nullopt;
}

std::string id_string(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

std::optional<VoteValue> vote_for_option(int index) {
  switch (index) {
    case 0: return VoteValue::kPositive;
    case 1: return VoteValue::kNeutral;
    case 2: return VoteValue::kNegative;
    default: return std::nullopt;
  }
}

std::vector<std::string> chunk_message(std::string_view text, std::size_t max_chars) {
  if (text::utf8_length(text) <= max_chars) return {std::string(text)};
  // The prefix width depends on the part count, so grow n until it fits.
  for (std::size_t n = 2;; ++n) {
    const std::size_t prefix = ("(" + std::to_string(n) + "/" + std::to_string(n) + ") ").size();
    if (prefix >= max_chars) {
      throw Error(ErrorCode::kInvalidConfig, "channel.max_message_length is too small");
    }
    const std::size_t room = max_chars - prefix;
    std::vector<std::string> bodies;
    std::string_view rest = text;
    while (!rest.empty()) {
      // Byte offset of the first `room` code points.
      std::size_t cut = 0;
      std::size_t chars = 0;
      while (cut < rest.size() && chars < room) {
        ++cut;
        while (cut < rest.size() && (static_cast<unsigned char>(rest[cut]) & 0xC0) == 0x80) ++cut;
        ++chars;
      }
      if (cut < rest.size()) {
        const auto space = rest.substr(0, cut).find_last_of(" \n");
        if (space != std::string_view::npos && space + 1 > cut / 2) cut = space + 1;
      }
      bodies.emplace_back(rest.substr(0, cut));
      rest.remove_prefix(cut);
    }
    if (bodies.size() <= n) {
      std::vector<std::string> parts;
      for (std::size_t i = 0; i < bodies.size(); ++i) {
        parts.push_back("(" + std::to_string(i + 1) + "/" + std::to_string(bodies.size()) + ") " +
                        bodies[i]);
      }
      return parts;
    }
  }
}

TelegramChannel::TelegramChannel(const ChannelSettings& settings, EnvLookup env)
    : settings_(settings) {
  const auto lookup = env ? env : EnvLookup(process_env);
  const auto token = lookup(settings_.bot_token_env);
  if (!token) {
    throw Error(ErrorCode::kAuthError,
                "bot token variable " + settings_.bot_token_env + " is not set");
  }
  token_ = *token;
  if (settings_.chat_id.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "channel.chat_id is required for telegram");
  }
}

Json TelegramChannel::call(const std::string& method, const Json& body) {
  httplib::Client client(settings_.api_base);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(30));
  const auto response =
      client.Post("/bot" + token_ + "/" + method, body.dump(), "application/json");
  if (!response) {
    throw ChannelFailure("telegram " + method + ": " + httplib::to_string(response.error()));
  }
  Json parsed;
  try {
    parsed = Json::parse(response->body);
  } catch (const Json::exception&) {
    throw ChannelFailure("telegram " + method + ": HTTP " + std::to_string(response->status));
  }
  if (parsed.value("ok", false)) return parsed.value("result", Json());
  const std::string description = parsed.value("description", std::string("request failed"));
  std::int64_t retry_after = 0;
  if (parsed.contains("parameters")) {
    retry_after = parsed["parameters"].value("retry_after", std::int64_t{0});
  }
  throw ChannelFailure("telegram " + method + ": " + description,
                       std::chrono::seconds(retry_after));
}

std::vector<std::string> TelegramChannel::publish_text(const GameConcept& concept_) {
  std::vector<std::string> ids;
  for (const std::string& part : chunk_message(concept_.body, settings_.max_message_length)) {
    const Json result = call("sendMessage", {{"chat_id", settings_.chat_id}, {"text", part}});
    ids.push_back(id_string(result.at("message_id")));
  }
  return ids;
}

PollHandle TelegramChannel::open_poll(const GameConcept& concept_,
                                      const std::vector<std::string>& message_ids) {
  Json options = Json::array();
  for (const char* o : kPollOptions) options.push_back({{"text", o}});
  Json body{{"chat_id", settings_.chat_id},
            {"question", concept_caption(concept_).substr(0, 250)},
            {"options", options},
            {"is_anonymous", true}};
  if (!message_ids.empty()) body["reply_to_message_id"] = std::stoll(message_ids.back());
  const Json result = call("sendPoll", body);
  PollHandle handle;
  handle.poll_message_id = id_string(result.at("message_id"));
  handle.poll_id = id_string(result.at("poll").at("id"));
  poll_counts_[handle.poll_id] = std::vector<std::int64_t>(3, 0);
  return handle;
}

void TelegramChannel::close_poll(const GameConcept& concept_,
                                 const store::PublicationReceipt& receipt,
                                 const store::VoteCounts& counts) {
  if (!receipt.poll_message_id.empty()) {
    call("stopPoll",
         {{"chat_id", settings_.chat_id}, {"message_id", std::stoll(receipt.poll_message_id)}});
  }
  call("sendMessage", {{"chat_id", settings_.chat_id}, {"text", tally_line(concept_, counts)}});
  poll_counts_.erase(receipt.poll_id);
}

std::vector<InboundVote> TelegramChannel::fetch_votes() {
  const Json updates =
      call("getUpdates", {{"offset", update_offset_},
                          {"timeout", 0},
                          {"allowed_updates", Json::array({"poll", "poll_answer"})}});
  std::vector<InboundVote> out;
  for (const Json& u : updates) {
    update_offset_ = std::max(update_offset_, u.value("update_id", std::int64_t{0}) + 1);
    if (u.contains("poll_answer")) {
      const Json& a = u["poll_answer"];
      InboundVote v;
      v.poll_id = id_string(a.at("poll_id"));
      v.user_ref = "tg:" + id_string(a.at("user").at("id"));
      const auto& chosen = a.at("option_ids");
      if (!chosen.empty()) v.value = vote_for_option(chosen.at(0).get<int>());
      out.push_back(std::move(v));
    } else if (u.contains("poll")) {
      // Anonymous polls only report option totals. Each increase becomes a
      // vote by "anon:<poll>:<option>:<n>", so re-reading the same totals is
      // idempotent.
      const Json& p = u["poll"];
      const std::string poll_id = id_string(p.at("id"));
      auto& last = poll_counts_[poll_id];
      last.resize(3, 0);
      const Json& options = p.at("options");
      for (std::size_t i = 0; i < options.size() && i < 3; ++i) {
        const std::int64_t now = options[i].value("voter_count", std::int64_t{0});
        for (std::int64_t n = last[i] + 1; n <= now; ++n) {
          InboundVote v;
          v.poll_id = poll_id;
          v.user_ref = "anon:" + poll_id + ":" + std::to_string(i) + ":" + std::to_string(n);
          v.value = vote_for_option(static_cast<int>(i));
          out.push_back(std::move(v));
        }
        last[i] = std::max(last[i], now);
      }
    }
  }
  return out;
}

}  // namespace evoforge::feedback
