#include "evoforge/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "evoforge/errors.hpp"
#include "evoforge/text.hpp"

namespace evoforge::engine {

FitnessReport compute_fitness(const ConceptId& concept_id, const VoteMap& votes) {
  FitnessReport r;
  r.concept_id = concept_id;
  for (const auto& [voter, value] : votes) {
    switch (value) {
      case VoteValue::kPositive: ++r.positives; break;
      case VoteValue::kNeutral: ++r.neutrals; break;
      case VoteValue::kNegative: ++r.negatives; break;
    }
  }
  r.eval_count = r.positives + r.neutrals + r.negatives;
  r.score = (static_cast<double>(r.positives) - static_cast<double>(r.negatives)) /
            static_cast<double>(std::max<std::size_t>(r.eval_count, 1));
  return r;
}

bool should_activate(const PopulationState& state, const std::set<ConceptId>& published,
                     const FitnessMap& fitness, const CampaignConfig& config) {
  if (state.evals_since_last_activation < config.trigger_new_evals) return false;
  return std::all_of(published.begin(), published.end(), [&](const ConceptId& id) {
    const auto it = fitness.find(id);
    const std::size_t count = it == fitness.end() ? 0 : it->second.eval_count;
    return count >= config.min_evals_per_published;
  });
}

std::vector<Candidate> candidates_for(std::span<const ConceptId> members,
                                      const std::map<ConceptId, GameConcept>& concepts,
                                      const FitnessMap& fitness) {
  std::vector<Candidate> out;
  out.reserve(members.size());
  for (const ConceptId& id : members) {
    Candidate c;
    c.id = id;
    if (const auto it = fitness.find(id); it != fitness.end()) {
      c.score = it->second.score;
      c.eval_count = it->second.eval_count;
    }
    const auto concept_it = concepts.find(id);
    if (concept_it == concepts.end()) {
      throw Error(ErrorCode::kUnknownConcept, "population member " + id.str() + " not found");
    }
    c.created_at_iteration = concept_it->second.created_at_iteration;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Negative when a beats b under the selection order, 0 on a full tie.
int compare_for_selection(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score ? -1 : 1;
  if (a.eval_count != b.eval_count) return a.eval_count < b.eval_count ? -1 : 1;
  if (a.created_at_iteration != b.created_at_iteration) {
    return a.created_at_iteration > b.created_at_iteration ? -1 : 1;
  }
  return 0;
}

}  // namespace

std::size_t pick_tournament_winner(std::span<const Candidate> sample, Rng& rng) {
  if (sample.empty()) throw Error(ErrorCode::kInvalidArgument, "empty tournament");
  std::vector<std::size_t> best{0};
  for (std::size_t i = 1; i < sample.size(); ++i) {
    const int cmp = compare_for_selection(sample[i], sample[best.front()]);
    if (cmp < 0) {
      best.assign(1, i);
    } else if (cmp == 0) {
      best.push_back(i);
    }
  }
  if (best.size() == 1) return best.front();
  return best[rng.uniform_index(best.size())];
}

ConceptId tournament_select(std::span<const Candidate> members, Rng& rng, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "tournament size must be at least 2");
  if (members.size() < k) {
    throw Error(ErrorCode::kPopulationTooSmall,
                "population of " + std::to_string(members.size()) +
                    " cannot host a tournament of " + std::to_string(k));
  }
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Candidate> sample;
  sample.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(order.size() - i);
    std::swap(order[i], order[j]);
    sample.push_back(members[order[i]]);
  }
  return sample[pick_tournament_winner(sample, rng)].id;
}

std::size_t removal_index(std::span<const Candidate> members, std::size_t min_evals) {
  if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "empty population");
  const bool any_eligible = std::any_of(members.begin(), members.end(), [&](const Candidate& c) {
    return c.eval_count >= min_evals;
  });
  std::optional<std::size_t> worst;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Candidate& c = members[i];
    if (any_eligible && c.eval_count < min_evals) continue;
    if (!worst) {
      worst = i;
      continue;
    }
    const Candidate& w = members[*worst];
    if (c.score < w.score ||
        (c.score == w.score && c.created_at_iteration < w.created_at_iteration)) {
      worst = i;
    }
  }
  return *worst;
}

Replacement replace_worst(const PopulationState& state, std::span<const Candidate> members,
                          const ConceptId& offspring, std::size_t min_evals) {
  if (members.size() != state.members.size()) {
    throw Error(ErrorCode::kInvalidArgument, "candidates do not match population members");
  }
  if (std::find(state.members.begin(), state.members.end(), offspring) != state.members.end()) {
    throw Error(ErrorCode::kInvalidArgument, "offspring " + offspring.str() + " already a member");
  }
  const std::size_t victim = removal_index(members, min_evals);
  Replacement out;
  out.state = state;
  out.removed = state.members[victim];
  out.state.members.erase(out.state.members.begin() + static_cast<std::ptrdiff_t>(victim));
  out.state.members.push_back(offspring);
  return out;
}

bool is_degenerate(const ops::ConceptDraft& draft, std::span<const GameConcept> parents) {
  const std::string body = text::normalize_body(draft.body);
  return std::any_of(parents.begin(), parents.end(), [&](const GameConcept& p) {
    return text::normalize_body(p.body) == body;
  });
}

BreedResult breed(const GameConcept& parent_a, const SecondParent& parent_b,
                  const CampaignConfig& config, ops::OperatorSuite& ops, Rng& rng) {
  if (config.mutation_focus_list.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "mutation_focus_list is empty");
  }
  const bool recombination_drawn = rng.bernoulli(config.recombination_prob);
  std::optional<GameConcept> partner;
  if (recombination_drawn && parent_b) partner = parent_b();

  BreedResult result;
  result.recombination_applied = partner.has_value();
  result.parent_ids.push_back(parent_a.id);
  std::vector<GameConcept> parents{parent_a};
  if (partner) {
    result.parent_ids.push_back(partner->id);
    parents.push_back(*partner);
  }
  result.mutation_focus =
      config.mutation_focus_list[rng.uniform_index(config.mutation_focus_list.size())];

  const ops::ConceptDraft a = ops::draft_of(parent_a);
  for (std::size_t attempt = 0; attempt <= config.degenerate_retries; ++attempt) {
    const ops::ConceptDraft base =
        partner ? ops.recombine(a, ops::draft_of(*partner), rng) : a;
    ops::ConceptDraft offspring = ops.mutate(base, result.mutation_focus, rng);
    if (!is_degenerate(offspring, parents)) {
      result.draft = std::move(offspring);
      return result;
    }
  }
  throw Error(ErrorCode::kDegenerateOffspring,
              "offspring of " + parent_a.id.str() + " repeats a parent after " +
                  std::to_string(config.degenerate_retries + 1) + " attempts");
}

ConceptId make_concept_id(const CampaignId& campaign, std::uint64_t number) {
  char digits[24];
  std::snprintf(digits, sizeof digits, "%03llu", static_cast<unsigned long long>(number));
  return ConceptId(campaign.str() + "-" + digits);
}

GameConcept make_concept(ConceptId id, CampaignId campaign, ops::ConceptDraft draft,
                         Origin origin, std::vector<ConceptId> parents,
                         std::optional<std::string> focus, std::int64_t iteration) {
  GameConcept c;
  c.id = std::move(id);
  c.campaign_id = std::move(campaign);
  c.body = std::move(draft.body);
  c.sections = std::move(draft.sections);
  c.origin = origin;
  c.parent_ids = std::move(parents);
  c.mutation_focus = std::move(focus);
  c.created_at_iteration = iteration;
  c.status = ConceptStatus::kActiveUnpublished;
  return c;
}

Initialization initialize_population(const CampaignId& campaign, const CampaignConfig& config,
                                     ops::OperatorSuite& ops) {
  const std::size_t n = config.population_size;
  std::size_t seeds = 0;
  switch (config.init_mode) {
    case InitMode::kRandom: break;
    case InitMode::kSeeded:
      if (config.seed_concepts.size() != n) {
        throw Error(ErrorCode::kSeedCountMismatch,
                    "seeded mode needs " + std::to_string(n) + " seed concepts, got " +
                        std::to_string(config.seed_concepts.size()));
      }
      seeds = n;
      break;
    case InitMode::kMixed:
      seeds = std::min(n / 2, config.seed_concepts.size());
      break;
  }

  Rng rng(Rng::derive(config.rng_seed, "init"));
  Initialization out;
  std::uint64_t number = 1;
  auto add = [&](ops::ConceptDraft draft, Origin origin) {
    out.concepts.push_back(make_concept(make_concept_id(campaign, number++), campaign,
                                        std::move(draft), origin, {}, std::nullopt, 0));
    out.state.members.push_back(out.concepts.back().id);
  };
  for (std::size_t i = 0; i < seeds; ++i) {
    add(ops.parse_seed(config.seed_concepts[i]), Origin::kHumanSeed);
  }
  for (std::size_t i = seeds; i < n; ++i) {
    add(ops.random_individual(rng), Origin::kLlmRandom);
  }
  return out;
}

void to_json(Json& j, const IterationRecord& r) {
  Json parents = Json::array();
  for (const ConceptId& p : r.parents) parents.push_back(p.str());
  j = Json{{"iteration", r.iteration},
           {"parents", parents},
           {"recombination_applied", r.recombination_applied},
           {"mutation_focus", r.mutation_focus},
           {"offspring_id", r.offspring_id.str()},
           {"removed_id", r.removed_id.str()},
           {"rng_state_digest", r.rng_state_digest}};
}

void from_json(const Json& j, IterationRecord& r) {
  r.iteration = j.at("iteration").get<std::int64_t>();
  r.parents.clear();
  for (const Json& p : j.at("parents")) r.parents.emplace_back(p.get<std::string>());
  r.recombination_applied = j.at("recombination_applied").get<bool>();
  r.mutation_focus = j.at("mutation_focus").get<std::string>();
  r.offspring_id = ConceptId(j.at("offspring_id").get<std::string>());
  r.removed_id = ConceptId(j.at("removed_id").get<std::string>());
  r.rng_state_digest = j.at("rng_state_digest").get<std::string>();
}

Rng activation_rng(const CampaignConfig& config, std::int64_t iteration) {
  return Rng(Rng::derive(config.rng_seed, "activation", static_cast<std::uint64_t>(iteration)));
}

Activation run_iteration(const CampaignId& campaign, const PopulationState& state,
                         const std::map<ConceptId, GameConcept>& concepts,
                         const FitnessMap& fitness, const CampaignConfig& config,
                         ops::OperatorSuite& ops, std::uint64_t next_concept_number) {
  const std::int64_t iteration = state.iteration + 1;
  Rng rng = activation_rng(config, iteration);
  const std::vector<Candidate> members = candidates_for(state.members, concepts, fitness);
  const std::size_t k = config.tournament_size;

  const GameConcept& parent_a = concepts.at(tournament_select(members, rng, k));
  const std::string body_a = text::normalize_body(parent_a.body);
  SecondParent second = [&]() -> std::optional<GameConcept> {
    for (std::size_t attempt = 0; attempt < config.population_size; ++attempt) {
      const GameConcept& b = concepts.at(tournament_select(members, rng, k));
      if (b.id != parent_a.id && text::normalize_body(b.body) != body_a) return b;
    }
    return std::nullopt;
  };

  BreedResult bred = breed(parent_a, second, config, ops, rng);
  const Origin origin = bred.recombination_applied ? Origin::kRecombination : Origin::kMutation;

  Activation out;
  out.offspring = make_concept(make_concept_id(campaign, next_concept_number), campaign,
                               std::move(bred.draft), origin, bred.parent_ids,
                               bred.mutation_focus, iteration);
  Replacement replaced =
      replace_worst(state, members, out.offspring.id, config.min_evals_per_published);
  out.state = std::move(replaced.state);
  out.state.iteration = iteration;
  out.state.evals_since_last_activation = 0;

  out.record.iteration = iteration;
  out.record.parents = std::move(bred.parent_ids);
  out.record.recombination_applied = bred.recombination_applied;
  out.record.mutation_focus = std::move(bred.mutation_focus);
  out.record.offspring_id = out.offspring.id;
  out.record.removed_id = std::move(replaced.removed);
  out.record.rng_state_digest = rng.state_digest();
  return out;
}

}  // namespace evoforge::engine
