#pragma once

// Steady-state interactive GA: fitness from votes, trigger, tournament
// selection, one-offspring breeding and worst-member replacement. Every
// function here is pure; callers apply the returned results.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/operators/suite.hpp"
#include "evoforge/rng.hpp"
#include "evoforge/serialization.hpp"

namespace evoforge::engine {

struct FitnessReport {
  ConceptId concept_id;
  std::size_t positives = 0;
  std::size_t neutrals = 0;
  std::size_t negatives = 0;
  std::size_t eval_count = 0;
  double score = 0.0;
};

using FitnessMap = std::map<ConceptId, FitnessReport>;

FitnessReport compute_fitness(const ConceptId& concept_id, const VoteMap& votes);

bool should_activate(const PopulationState& state, const std::set<ConceptId>& published,
                     const FitnessMap& fitness, const CampaignConfig& config);

/// What selection and replacement need to know about one population member.
struct Candidate {
  ConceptId id;
  double score = 0.0;
  std::size_t eval_count = 0;
  std::int64_t created_at_iteration = 0;
};

/// Candidates for `members` in member order; members without a fitness entry
/// count as unevaluated.
std::vector<Candidate> candidates_for(std::span<const ConceptId> members,
                                      const std::map<ConceptId, GameConcept>& concepts,
                                      const FitnessMap& fitness);

/// Index of the tournament winner within `sample`: highest score, then fewer
/// evaluations, then newer, then a uniform draw among the remaining ties.
std::size_t pick_tournament_winner(std::span<const Candidate> sample, Rng& rng);

/// Samples k distinct members uniformly and returns the winner.
ConceptId tournament_select(std::span<const Candidate> members, Rng& rng, std::size_t k);

/// Index of the member to delete: minimum score among members with at least
/// `min_evals` evaluations (all members when none qualify), oldest first, then
/// earliest in member order.
std::size_t removal_index(std::span<const Candidate> members, std::size_t min_evals);

struct Replacement {
  PopulationState state;
  ConceptId removed;
};

/// Removes the worst of `members` (aligned with state.members) and appends the
/// offspring.
Replacement replace_worst(const PopulationState& state, std::span<const Candidate> members,
                          const ConceptId& offspring, std::size_t min_evals);

struct IterationRecord {
  std::int64_t iteration = 0;
  std::vector<ConceptId> parents;
  bool recombination_applied = false;
  std::string mutation_focus;
  ConceptId offspring_id;
  ConceptId removed_id;
  std::string rng_state_digest;
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

void to_json(Json& j, const IterationRecord& r);
void from_json(const Json& j, IterationRecord& r);

struct BreedResult {
  ops::ConceptDraft draft;
  bool recombination_applied = false;
  std::vector<ConceptId> parent_ids;
  std::string mutation_focus;
};

/// Produces the second parent on demand; nullopt when no distinct partner
/// could be found.
using SecondParent = std::function<std::optional<GameConcept>()>;

/// With probability recombination_prob: mutate(recombine(a, b)); otherwise
/// mutate(a). Falls back to mutation-only when no second parent is available.
BreedResult breed(const GameConcept& parent_a, const SecondParent& parent_b,
                  const CampaignConfig& config, ops::OperatorSuite& ops, Rng& rng);

/// True when the body equals a parent body after lowercasing and whitespace
/// folding.
bool is_degenerate(const ops::ConceptDraft& draft, std::span<const GameConcept> parents);

ConceptId make_concept_id(const CampaignId& campaign, std::uint64_t number);

GameConcept make_concept(ConceptId id, CampaignId campaign, ops::ConceptDraft draft,
                         Origin origin, std::vector<ConceptId> parents,
                         std::optional<std::string> focus, std::int64_t iteration);

struct Initialization {
  std::vector<GameConcept> concepts;
  PopulationState state;
};

Initialization initialize_population(const CampaignId& campaign, const CampaignConfig& config,
                                     ops::OperatorSuite& ops);

struct Activation {
  IterationRecord record;
  GameConcept offspring;
  PopulationState state;
};

/// One select-breed-replace cycle. Nothing is modified; on error the caller's
/// population is untouched. `next_concept_number` numbers the offspring id.
Activation run_iteration(const CampaignId& campaign, const PopulationState& state,
                         const std::map<ConceptId, GameConcept>& concepts,
                         const FitnessMap& fitness, const CampaignConfig& config,
                         ops::OperatorSuite& ops, std::uint64_t next_concept_number);

/// Stream for the n-th activation; derived from the campaign seed alone so a
/// replayed campaign needs no stored generator state.
Rng activation_rng(const CampaignConfig& config, std::int64_t iteration);

}  // namespace evoforge::engine
