#include "evoforge/domain.hpp"

#include <cmath>
#include <set>

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidTransition: return "invalid_transition";
    case ErrorCode::kSeedCountMismatch: return "seed_count_mismatch";
    case ErrorCode::kPopulationTooSmall: return "population_too_small";
    case ErrorCode::kDegenerateOffspring: return "degenerate_offspring";
    case ErrorCode::kMissingInterpretationList: return "missing_interpretation_list";
    case ErrorCode::kIdenticalParents: return "identical_parents";
    case ErrorCode::kFocusNotInList: return "focus_not_in_list";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kGenerationFailed: return "generation_failed";
    case ErrorCode::kBackendFailure: return "backend_failure";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kAuthError: return "auth_error";
    case ErrorCode::kInvalidTemplate: return "invalid_template";
    case ErrorCode::kStorageFull: return "storage_full";
    case ErrorCode::kCorruptLog: return "corrupt_log";
    case ErrorCode::kUnknownCampaign: return "unknown_campaign";
    case ErrorCode::kUnknownConcept: return "unknown_concept";
    case ErrorCode::kAlreadyPublished: return "already_published";
    case ErrorCode::kChannelFailure: return "channel_failure";
    case ErrorCode::kSimulationStalled: return "simulation_stalled";
  }
  return "unknown";
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::kLlmRandom: return "llm_random";
    case Origin::kHumanSeed: return "human_seed";
    case Origin::kRecombination: return "recombination";
    case Origin::kMutation: return "mutation";
  }
  return "llm_random";
}

std::string_view to_string(ConceptStatus status) {
  switch (status) {
    case ConceptStatus::kActiveUnpublished: return "active_unpublished";
    case ConceptStatus::kActivePublished: return "active_published";
    case ConceptStatus::kRetired: return "retired";
  }
  return "active_unpublished";
}

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::kRandom: return "random";
    case InitMode::kSeeded: return "seeded";
    case InitMode::kMixed: return "mixed";
  }
  return "random";
}

Origin origin_from_string(std::string_view text) {
  if (text == "llm_random") return Origin::kLlmRandom;
  if (text == "human_seed") return Origin::kHumanSeed;
  if (text == "recombination") return Origin::kRecombination;
  if (text == "mutation") return Origin::kMutation;
  throw Error(ErrorCode::kInvalidArgument, "unknown origin '" + std::string(text) + "'");
}

ConceptStatus status_from_string(std::string_view text) {
  if (text == "active_unpublished") return ConceptStatus::kActiveUnpublished;
  if (text == "active_published") return ConceptStatus::kActivePublished;
  if (text == "retired") return ConceptStatus::kRetired;
  throw Error(ErrorCode::kInvalidArgument, "unknown status '" + std::string(text) + "'");
}

InitMode init_mode_from_string(std::string_view text) {
  if (text == "random") return InitMode::kRandom;
  if (text == "seeded") return InitMode::kSeeded;
  if (text == "mixed") return InitMode::kMixed;
  throw Error(ErrorCode::kInvalidConfig, "unknown init_mode '" + std::string(text) + "'");
}

std::optional<VoteValue> vote_value_from_int(long long value) {
  switch (value) {
    case -1: return VoteValue::kNegative;
    case 0: return VoteValue::kNeutral;
    case 1: return VoteValue::kPositive;
    default: return std::nullopt;
  }
}

std::vector<std::string> concept_violations(const GameConcept& concept_) {
  std::vector<std::string> out;
  const std::size_t parents = concept_.parent_ids.size();
  switch (concept_.origin) {
    case Origin::kRecombination:
      if (parents != 2 || concept_.parent_ids[0] == concept_.parent_ids[1]) {
        out.push_back("recombination requires exactly 2 distinct parents");
      }
      break;
    case Origin::kMutation:
      if (parents != 1) out.push_back("mutation requires exactly 1 parent");
      break;
    case Origin::kLlmRandom:
    case Origin::kHumanSeed:
      if (parents != 0) out.push_back("initial concepts have no parents");
      break;
  }
  for (const Section& s : concept_.sections) {
    if (s.char_limit == 0) continue;
    const double band = kSectionLengthTolerance * static_cast<double>(s.char_limit);
    if (static_cast<double>(text::utf8_length(s.text)) > band) {
      out.push_back("section '" + s.label + "' exceeds " +
                    std::to_string(static_cast<std::size_t>(band)) + " chars");
    }
  }
  return out;
}

bool can_transition(ConceptStatus from, ConceptStatus to) {
  return static_cast<int>(to) > static_cast<int>(from);
}

void advance_status(GameConcept& concept_, ConceptStatus to) {
  if (!can_transition(concept_.status, to)) {
    throw Error(ErrorCode::kInvalidTransition,
                "concept " + concept_.id.str() + ": " +
                    std::string(to_string(concept_.status)) + " -> " +
                    std::string(to_string(to)));
  }
  concept_.status = to;
}

VoteMap effective_evaluations(std::span<const Evaluation> evals,
                              const ConceptId& concept_id) {
  VoteMap out;
  for (const Evaluation& e : evals) {
    if (e.concept_id == concept_id) out[e.voter] = e.value;
  }
  return out;
}

std::optional<TimeOfDay> parse_time_of_day(std::string_view text) {
  text = text::trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 3 != text.size()) {
    return std::nullopt;
  }
  auto digits = [](std::string_view part) -> std::optional<int> {
    if (part.empty() || part.size() > 2) return std::nullopt;
    int v = 0;
    for (char c : part) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  auto h = digits(text.substr(0, colon));
  auto m = digits(text.substr(colon + 1));
  if (!h || !m || *h > 23 || *m > 59) return std::nullopt;
  return TimeOfDay{*h, *m};
}

std::string to_string(TimeOfDay time) {
  std::string out(5, '0');
  out[0] = static_cast<char>('0' + time.hour / 10);
  out[1] = static_cast<char>('0' + time.hour % 10);
  out[2] = ':';
  out[3] = static_cast<char>('0' + time.minute / 10);
  out[4] = static_cast<char>('0' + time.minute % 10);
  return out;
}

std::chrono::milliseconds RetryPolicy::delay_before(int next_attempt) const {
  if (backoff.empty() || next_attempt < 2) return std::chrono::milliseconds{0};
  const auto index = static_cast<std::size_t>(next_attempt - 2);
  return backoff[std::min(index, backoff.size() - 1)];
}

std::vector<ConfigViolation> validate_config(const CampaignConfig& config) {
  std::vector<ConfigViolation> out;
  if (config.population_size < config.tournament_size) {
    out.push_back({"population_size", "must be >= tournament_size"});
  }
  if (config.tournament_size < 2) {
    out.push_back({"tournament_size", "must be >= 2"});
  }
  if (!(config.recombination_prob >= 0.0 && config.recombination_prob <= 1.0)) {
    out.push_back({"recombination_prob", "must be within [0, 1]"});
  }
  if (config.trigger_new_evals < 1) {
    out.push_back({"trigger_new_evals", "must be >= 1"});
  }
  if (config.mutation_focus_list.empty()) {
    out.push_back({"mutation_focus_list", "must be non-empty"});
  }
  for (std::size_t i = 1; i < config.publish_slots.size(); ++i) {
    if (!(config.publish_slots[i - 1] < config.publish_slots[i])) {
      out.push_back({"publish_slots", "must be strictly increasing within a day"});
      break;
    }
  }
  if (config.backend.retry.max_attempts < 1) {
    out.push_back({"backend.retry.max_attempts", "must be >= 1"});
  }
  if (config.backend.kind != "mock" && config.backend.kind != "http") {
    out.push_back({"backend.kind", "must be one of mock, http"});
  }
  if (config.channel.kind != "console" && config.channel.kind != "telegram" &&
      config.channel.kind != "web") {
    out.push_back({"channel.kind", "must be one of console, telegram, web"});
  }
  return out;
}

}  // namespace evoforge
