#pragma once

// Shared vocabulary: campaigns, concepts, evaluations and configuration.

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoforge {

using Timestamp = std::chrono::sys_seconds;

/// Opaque string identifier, distinct per Tag so ids cannot be mixed up.
template <typename Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

 private:
  std::string value_;
};

using ConceptId = Id<struct ConceptIdTag>;
using CampaignId = Id<struct CampaignIdTag>;
using VoterToken = Id<struct VoterTokenTag>;

enum class Origin { kLlmRandom, kHumanSeed, kRecombination, kMutation };
enum class ConceptStatus { kActiveUnpublished, kActivePublished, kRetired };
enum class VoteValue : int { kNegative = -1, kNeutral = 0, kPositive = 1 };
enum class InitMode { kRandom, kSeeded, kMixed };

std::string_view to_string(Origin origin);
std::string_view to_string(ConceptStatus status);
std::string_view to_string(InitMode mode);
Origin origin_from_string(std::string_view text);
ConceptStatus status_from_string(std::string_view text);
InitMode init_mode_from_string(std::string_view text);

std::optional<VoteValue> vote_value_from_int(long long value);
inline int to_int(VoteValue value) { return static_cast<int>(value); }

/// Sections may overshoot their prompt limit by this factor before the
/// operator pipeline re-prompts or truncates.
inline constexpr double kSectionLengthTolerance = 1.25;

struct Section {
  std::string label;
  std::string text;
  std::size_t char_limit = 0;  // 0 = unlimited

  friend bool operator==(const Section&, const Section&) = default;
};

struct GameConcept {
  ConceptId id;
  CampaignId campaign_id;
  std::string body;
  std::vector<Section> sections;
  Origin origin = Origin::kLlmRandom;
  std::vector<ConceptId> parent_ids;
  std::optional<std::string> mutation_focus;
  std::int64_t created_at_iteration = 0;
  ConceptStatus status = ConceptStatus::kActiveUnpublished;

  friend bool operator==(const GameConcept&, const GameConcept&) = default;
};

/// Violations of the GameConcept invariants (origin/parent arity, section
/// length band). Empty when the concept is well formed.
std::vector<std::string> concept_violations(const GameConcept& concept_);

/// Status only moves forward: active_unpublished -> active_published -> retired.
/// Retiring an unpublished concept directly is allowed (it skips a stage but
/// never goes backwards).
bool can_transition(ConceptStatus from, ConceptStatus to);

/// Applies the transition or throws Error(kInvalidTransition).
void advance_status(GameConcept& concept_, ConceptStatus to);

struct Evaluation {
  VoterToken voter;
  ConceptId concept_id;
  VoteValue value = VoteValue::kNeutral;
  Timestamp submitted_at{};
};

using VoteMap = std::map<VoterToken, VoteValue>;

/// Latest value per voter for `concept_id`. "Latest" means last in list
/// order; timestamps are never consulted.
VoteMap effective_evaluations(std::span<const Evaluation> evals,
                              const ConceptId& concept_id);

struct TimeOfDay {
  int hour = 0;
  int minute = 0;

  int minutes() const { return hour * 60 + minute; }
  friend auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;
};

std::optional<TimeOfDay> parse_time_of_day(std::string_view text);
std::string to_string(TimeOfDay time);

struct RetryPolicy {
  int max_attempts = 3;
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds{500},
                                                 std::chrono::milliseconds{2000}};

  /// Delay before attempt `next_attempt` (2-based); the last schedule entry
  /// repeats.
  std::chrono::milliseconds delay_before(int next_attempt) const;
};

struct BackendSettings {
  std::string kind = "mock";  // mock | http
  std::string name = "mock";
  std::uint64_t mock_seed = 7;
  std::string base_url;
  std::string endpoint_path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  RetryPolicy retry;
  std::chrono::milliseconds timeout{60000};
  double temperature = 1.0;
  std::size_t max_length = 1024;
};

struct ChannelSettings {
  std::string kind = "console";  // console | telegram | web
  std::string timezone = "UTC";
  bool immediate_mode = false;
  std::string chat_id;
  std::string bot_token_env = "TELEGRAM_BOT_TOKEN";
  std::string api_base = "https://api.telegram.org";
  std::size_t max_message_length = 4096;
  std::string voter_salt;
};

struct TemplatePaths {
  std::string init;
  std::string crossover;
  std::string mutation;
};

struct CampaignConfig {
  std::string brief;
  InitMode init_mode = InitMode::kRandom;
  std::vector<std::string> seed_concepts;
  std::vector<std::string> interpretations;
  std::size_t population_size = 10;
  std::size_t tournament_size = 2;
  double recombination_prob = 0.7;
  std::vector<std::string> mutation_focus_list{
      "the goal of the game", "the game's resources", "the level design",
      "the player's input"};
  std::size_t trigger_new_evals = 25;
  std::size_t min_evals_per_published = 1;
  std::vector<TimeOfDay> publish_slots{{9, 0}, {12, 0}, {17, 30}};
  std::optional<std::size_t> max_iterations;
  std::uint64_t rng_seed = 0;
  std::size_t degenerate_retries = 1;
  std::size_t malformed_retries = 2;
  BackendSettings backend;
  ChannelSettings channel;
  TemplatePaths templates;
};

struct ConfigViolation {
  std::string field;
  std::string rule;

  friend bool operator==(const ConfigViolation&, const ConfigViolation&) = default;
};

std::vector<ConfigViolation> validate_config(const CampaignConfig& config);

struct PopulationState {
  std::vector<ConceptId> members;
  std::int64_t iteration = 0;
  std::size_t evals_since_last_activation = 0;

  friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

}  // namespace evoforge

template <typename Tag>
struct std::hash<evoforge::Id<Tag>> {
  std::size_t operator()(const evoforge::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
