#include "support.hpp"

#include <algorithm>
#include <map>

#include "evoforge/engine.hpp"
#include "evoforge/errors.hpp"
#include "evoforge/feedback/campaign.hpp"
#include "evoforge/feedback/web_channel.hpp"
#include "oracles.hpp"

using namespace evoforge;
using engine::Candidate;

namespace {

VoteMap votes(int pos, int neu, int neg) {
  VoteMap m;
  int n = 0;
  for (int i = 0; i < pos; ++i) m[VoterToken("v" + std::to_string(n++))] = VoteValue::kPositive;
  for (int i = 0; i < neu; ++i) m[VoterToken("v" + std::to_string(n++))] = VoteValue::kNeutral;
  for (int i = 0; i < neg; ++i) m[VoterToken("v" + std::to_string(n++))] = VoteValue::kNegative;
  return m;
}

Candidate cand(const std::string& id, double score, std::size_t evals = 1,
               std::int64_t created = 0) {
  return Candidate{ConceptId(id), score, evals, created};
}

/// Wraps the mock and fails every call once `failing` is set.
class SwitchableBackend final : public ops::CompletionBackend {
 public:
  explicit SwitchableBackend(std::uint64_t seed) : inner_(seed) {}
  const ops::BackendProfile& profile() const override { return inner_.profile(); }
  std::string attempt(const ops::CompletionRequest& request) override {
    ++calls;
    if (failing) throw ops::TransientBackendError("503 service unavailable");
    return inner_.attempt(request);
  }
  bool failing = false;
  std::size_t calls = 0;

 private:
  ops::MockBackend inner_;
};

struct Population {
  std::map<ConceptId, GameConcept> concepts;
  PopulationState state;
};

Population initialized(const CampaignConfig& config, ops::OperatorSuite& suite) {
  const auto init = engine::initialize_population(CampaignId("t"), config, suite);
  Population p;
  for (const auto& c : init.concepts) p.concepts.emplace(c.id, c);
  p.state = init.state;
  return p;
}

}  // namespace

TEST_CASE("fitness follows the score formula") {
  auto f = engine::compute_fitness(ConceptId("x"), votes(3, 1, 1));
  CHECK(f.positives == 3);
  CHECK(f.neutrals == 1);
  CHECK(f.negatives == 1);
  CHECK(f.eval_count == 5);
  CHECK(f.score == doctest::Approx(0.4));

  f = engine::compute_fitness(ConceptId("x"), {});
  CHECK(f.score == 0.0);
  CHECK(f.eval_count == 0);

  f = engine::compute_fitness(ConceptId("x"), votes(0, 5, 0));
  CHECK(f.score == 0.0);
  CHECK(f.eval_count == 5);
}

TEST_CASE("fitness ignores vote order and overwritten duplicates") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Evaluation> evals;
    for (int i = 0; i < 30; ++i) {
      evals.push_back({VoterToken("u" + std::to_string(gen() % 12)), ConceptId("x"),
                       static_cast<VoteValue>(static_cast<int>(gen() % 3) - 1),
                       {}});
    }
    const auto base = engine::compute_fitness(ConceptId("x"),
                                              effective_evaluations(evals, ConceptId("x")));
    CHECK(base.eval_count == base.positives + base.neutrals + base.negatives);
    CHECK(base.score >= -1.0);
    CHECK(base.score <= 1.0);

    // Reorder while keeping each voter's last vote last.
    std::map<VoterToken, Evaluation> last;
    for (const auto& e : evals) last[e.voter] = e;
    std::vector<Evaluation> shuffled;
    for (const auto& [voter, e] : last) shuffled.push_back(e);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    std::vector<Evaluation> noisy;
    for (const auto& e : shuffled) {
      noisy.push_back({e.voter, e.concept_id, VoteValue::kPositive, {}});
      noisy.push_back(e);
    }
    const auto again = engine::compute_fitness(ConceptId("x"),
                                               effective_evaluations(noisy, ConceptId("x")));
    CHECK(again.score == doctest::Approx(base.score));
    CHECK(again.eval_count == base.eval_count);
  }
}

TEST_CASE("activation trigger needs enough new votes and coverage of published concepts") {
  CampaignConfig config;
  PopulationState state;
  state.members = {ConceptId("a"), ConceptId("b")};
  const std::set<ConceptId> published{ConceptId("a"), ConceptId("b")};
  engine::FitnessMap fitness;
  fitness[ConceptId("a")] = engine::compute_fitness(ConceptId("a"), votes(1, 0, 0));
  fitness[ConceptId("b")] = engine::compute_fitness(ConceptId("b"), votes(0, 1, 0));

  state.evals_since_last_activation = 25;
  CHECK(engine::should_activate(state, published, fitness, config));
  state.evals_since_last_activation = 24;
  CHECK_FALSE(engine::should_activate(state, published, fitness, config));

  state.evals_since_last_activation = 30;
  fitness[ConceptId("b")] = engine::compute_fitness(ConceptId("b"), {});
  CHECK_FALSE(engine::should_activate(state, published, fitness, config));
  fitness.erase(ConceptId("b"));
  CHECK_FALSE(engine::should_activate(state, published, fitness, config));
}

TEST_CASE("tournament examples") {
  Rng rng(1);
  std::vector<Candidate> two{cand("A", 0.4), cand("B", -0.2)};
  for (int i = 0; i < 20; ++i) CHECK(engine::tournament_select(two, rng, 2) == ConceptId("A"));

  std::vector<Candidate> tie{cand("A", 0.4, 5), cand("A2", 0.4, 2)};
  for (int i = 0; i < 20; ++i) CHECK(engine::tournament_select(tie, rng, 2) == ConceptId("A2"));

  std::vector<Candidate> age{cand("old", 0.4, 2, 0), cand("new", 0.4, 2, 3)};
  CHECK(engine::tournament_select(age, rng, 2) == ConceptId("new"));
}

TEST_CASE("tournament preconditions") {
  Rng rng(1);
  std::vector<Candidate> one{cand("A", 0.0)};
  try {
    engine::tournament_select(one, rng, 2);
    FAIL("small population accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPopulationTooSmall);
  }
  std::vector<Candidate> two{cand("A", 0.0), cand("B", 0.0)};
  CHECK_THROWS_AS(engine::tournament_select(two, rng, 1), Error);
}

TEST_CASE("tournament winner matches the brute-force tie chain on every small sample") {
  // Every population of size 2..5 over a small attribute grid.
  const std::vector<double> scores{-0.5, 0.5};
  const std::vector<std::size_t> evals{0, 2};
  const std::vector<std::int64_t> created{0, 1};
  std::vector<Candidate> grid;
  for (double s : scores) {
    for (std::size_t e : evals) {
      for (std::int64_t c : created) grid.push_back(Candidate{ConceptId(), s, e, c});
    }
  }
  Rng rng(17);
  std::size_t checked = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    std::vector<std::size_t> digits(n, 0);
    while (true) {
      std::vector<Candidate> sample;
      for (std::size_t i = 0; i < n; ++i) {
        Candidate c = grid[digits[i]];
        c.id = ConceptId("m" + std::to_string(i));
        sample.push_back(c);
      }
      const auto allowed = oracle::tournament_winners(sample);
      const std::size_t got = engine::pick_tournament_winner(sample, rng);
      CHECK(allowed.count(got) == 1);
      ++checked;
      std::size_t d = 0;
      while (d < n && ++digits[d] == grid.size()) digits[d++] = 0;
      if (d == n) break;
    }
  }
  CHECK(checked > 30000);
}

TEST_CASE("tournament_select frequencies follow the exact subset distribution") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + gen() % 4;
    const std::size_t k = 2 + gen() % (n - 1);
    std::vector<Candidate> members;
    for (std::size_t i = 0; i < n; ++i) {
      members.push_back(Candidate{ConceptId("m" + std::to_string(i)),
                                  static_cast<double>(gen() % 3) / 2.0, gen() % 2,
                                  static_cast<std::int64_t>(gen() % 2)});
    }
    const auto exact = oracle::tournament_distribution(members, k);
    Rng rng(static_cast<std::uint64_t>(trial));
    const int draws = 6000;
    std::map<ConceptId, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[engine::tournament_select(members, rng, k)];
    for (std::size_t i = 0; i < n; ++i) {
      const double p = exact[i];
      const double sd = std::sqrt(p * (1 - p) / draws);
      CHECK(std::abs(counts[members[i].id] / double(draws) - p) <= 4 * sd + 1e-9);
    }
  }
}

TEST_CASE("replacement examples") {
  PopulationState state;
  state.members = {ConceptId("A"), ConceptId("B"), ConceptId("C")};
  std::vector<Candidate> m{cand("A", 0.4), cand("B", 0.0), cand("C", -0.5)};
  auto r = engine::replace_worst(state, m, ConceptId("D"), 1);
  CHECK(r.removed == ConceptId("C"));
  CHECK(r.state.members ==
        std::vector<ConceptId>{ConceptId("A"), ConceptId("B"), ConceptId("D")});

  state.members = {ConceptId("B"), ConceptId("A")};
  std::vector<Candidate> ages{cand("B", -0.2, 1, 4), cand("A", -0.2, 1, 1)};
  CHECK(engine::replace_worst(state, ages, ConceptId("D"), 1).removed == ConceptId("A"));

  // Protected members (too few votes) survive unless everyone is protected.
  state.members = {ConceptId("A"), ConceptId("B")};
  std::vector<Candidate> prot{cand("A", 0.5, 3), cand("B", -1.0, 0)};
  CHECK(engine::replace_worst(state, prot, ConceptId("D"), 1).removed == ConceptId("A"));
  std::vector<Candidate> fresh{cand("A", 0.0, 0, 2), cand("B", 0.0, 0, 0)};
  CHECK(engine::replace_worst(state, fresh, ConceptId("D"), 1).removed == ConceptId("B"));
}

TEST_CASE("removal target equals a brute-force scan") {
  const std::vector<double> scores{-1.0, 0.0, 0.5};
  const std::vector<std::size_t> evals{0, 1, 3};
  const std::vector<std::int64_t> created{0, 2};
  std::vector<Candidate> grid;
  for (double s : scores) {
    for (std::size_t e : evals) {
      for (std::int64_t c : created) grid.push_back(Candidate{ConceptId(), s, e, c});
    }
  }
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    std::vector<Candidate> members;
    PopulationState state;
    for (std::size_t i = 0; i < n; ++i) {
      Candidate c = grid[gen() % grid.size()];
      c.id = ConceptId("m" + std::to_string(i));
      members.push_back(c);
      state.members.push_back(c.id);
    }
    const std::size_t min_evals = gen() % 3;
    const std::size_t expected = oracle::removal(members, min_evals);
    CHECK(engine::removal_index(members, min_evals) == expected);
    const auto r = engine::replace_worst(state, members, ConceptId("offspring"), min_evals);
    CHECK(r.removed == members[expected].id);
    CHECK(r.state.members.size() == n);
    CHECK(r.state.members.back() == ConceptId("offspring"));
  }
}

TEST_CASE("initialization modes") {
  CampaignConfig config = testing::example_config("minimalist");
  {
    testing::MockOps ops(config);
    const auto init = engine::initialize_population(CampaignId("t"), config, ops.suite);
    REQUIRE(init.concepts.size() == 10);
    CHECK(init.state.members.size() == 10);
    for (const auto& c : init.concepts) {
      CHECK(c.origin == Origin::kLlmRandom);
      CHECK(c.status == ConceptStatus::kActiveUnpublished);
      CHECK(concept_violations(c).empty());
    }
    CHECK(init.concepts.front().id == ConceptId("t-001"));
    CHECK(init.concepts.back().id == ConceptId("t-010"));
  }
  {
    CampaignConfig seeded = config;
    seeded.init_mode = InitMode::kSeeded;
    for (int i = 0; i < 10; ++i) {
      seeded.seed_concepts.push_back("Name of the game: Seed " + std::to_string(i) +
                                     "\nGame concept: A seeded idea number " + std::to_string(i));
    }
    testing::MockOps ops(seeded);
    const auto init = engine::initialize_population(CampaignId("t"), seeded, ops.suite);
    CHECK(init.concepts.size() == 10);
    for (const auto& c : init.concepts) CHECK(c.origin == Origin::kHumanSeed);
    CHECK(ops.backend.calls() == 0);

    seeded.seed_concepts.pop_back();
    try {
      engine::initialize_population(CampaignId("t"), seeded, ops.suite);
      FAIL("seed count mismatch accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kSeedCountMismatch);
    }
  }
  for (const std::size_t seeds : {0u, 3u, 5u, 9u}) {
    CampaignConfig mixed = config;
    mixed.init_mode = InitMode::kMixed;
    for (std::size_t i = 0; i < seeds; ++i) mixed.seed_concepts.push_back("Seed idea " + std::to_string(i));
    testing::MockOps ops(mixed);
    const auto init = engine::initialize_population(CampaignId("t"), mixed, ops.suite);
    const auto human = std::count_if(init.concepts.begin(), init.concepts.end(),
                                     [](const GameConcept& c) { return c.origin == Origin::kHumanSeed; });
    const auto random = std::count_if(init.concepts.begin(), init.concepts.end(),
                                      [](const GameConcept& c) { return c.origin == Origin::kLlmRandom; });
    CHECK(static_cast<std::size_t>(human) == std::min<std::size_t>(seeds, 5));
    CHECK(static_cast<std::size_t>(human + random) == 10);
  }
}

TEST_CASE("breed branch contract") {
  CampaignConfig config = testing::example_config("minimalist");
  testing::MockOps ops(config);
  Population pop = initialized(config, ops.suite);
  const GameConcept& a = pop.concepts.at(ConceptId("t-001"));
  const GameConcept& b = pop.concepts.at(ConceptId("t-002"));

  config.recombination_prob = 1.0;
  Rng rng(3);
  auto r = engine::breed(a, [&] { return std::optional<GameConcept>(b); }, config, ops.suite, rng);
  CHECK(r.recombination_applied);
  CHECK(r.parent_ids == std::vector<ConceptId>{a.id, b.id});
  CHECK(std::find(config.mutation_focus_list.begin(), config.mutation_focus_list.end(),
                  r.mutation_focus) != config.mutation_focus_list.end());

  config.recombination_prob = 0.0;
  bool asked = false;
  r = engine::breed(a, [&] { asked = true; return std::optional<GameConcept>(b); }, config,
                    ops.suite, rng);
  CHECK_FALSE(r.recombination_applied);
  CHECK_FALSE(asked);
  CHECK(r.parent_ids == std::vector<ConceptId>{a.id});

  // No distinct partner available: mutation only.
  config.recombination_prob = 1.0;
  r = engine::breed(a, [] { return std::optional<GameConcept>(); }, config, ops.suite, rng);
  CHECK_FALSE(r.recombination_applied);
  CHECK(r.parent_ids.size() == 1);
}

TEST_CASE("breed draws recombination at the configured rate") {
  CampaignConfig config = testing::example_config("minimalist");
  testing::MockOps ops(config);
  Population pop = initialized(config, ops.suite);
  const GameConcept& a = pop.concepts.at(ConceptId("t-001"));
  const GameConcept& b = pop.concepts.at(ConceptId("t-002"));
  Rng rng(2024);
  std::size_t recombined = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto r = engine::breed(a, [&] { return std::optional<GameConcept>(b); }, config,
                                 ops.suite, rng);
    recombined += r.recombination_applied ? 1 : 0;
  }
  const auto band = oracle::binomial_band(1000, 0.7, 3.0);
  CHECK(recombined >= band.lo);
  CHECK(recombined <= band.hi);
}

TEST_CASE("offspring identical to a parent is degenerate") {
  GameConcept p;
  p.body = "Name: Echo\n\nConcept:  Jump";
  ops::ConceptDraft same{{}, "name: echo concept: jump"};
  ops::ConceptDraft other{{}, "name: echo concept: run"};
  std::vector<GameConcept> parents{p};
  CHECK(engine::is_degenerate(same, parents));
  CHECK_FALSE(engine::is_degenerate(other, parents));
}

TEST_CASE("repeated activations keep the population size and count concepts") {
  for (const std::size_t iterations : {30u, 15u}) {
    CampaignConfig config = testing::example_config("minimalist");
    testing::MockOps ops(config);
    Population pop = initialized(config, ops.suite);
    std::uint64_t next = pop.concepts.size() + 1;
    for (std::size_t i = 0; i < iterations; ++i) {
      const auto expected_removed = pop.state.members.front();
      const auto act = engine::run_iteration(CampaignId("t"), pop.state, pop.concepts, {}, config,
                                             ops.suite, next++);
      // Nobody has votes: everyone is eligible, all scores tie, the oldest dies.
      if (i == 0) CHECK(act.record.removed_id == expected_removed);
      CHECK(act.record.removed_id != act.record.offspring_id);
      if (act.record.recombination_applied) {
        REQUIRE(act.record.parents.size() == 2);
        CHECK(act.record.parents[0] != act.record.parents[1]);
        CHECK(act.offspring.origin == Origin::kRecombination);
      } else {
        CHECK(act.record.parents.size() == 1);
        CHECK(act.offspring.origin == Origin::kMutation);
      }
      CHECK(concept_violations(act.offspring).empty());
      CHECK(act.state.iteration == pop.state.iteration + 1);
      CHECK(act.state.evals_since_last_activation == 0);
      for (const auto& parent : act.offspring.parent_ids) {
        CHECK(pop.concepts.at(parent).created_at_iteration < act.offspring.created_at_iteration);
      }
      pop.concepts.at(act.record.removed_id).status = ConceptStatus::kRetired;
      pop.concepts.emplace(act.offspring.id, act.offspring);
      pop.state = act.state;
      CHECK(pop.state.members.size() == config.population_size);
      for (const auto& m : pop.state.members) {
        CHECK(pop.concepts.at(m).status != ConceptStatus::kRetired);
      }
    }
    CHECK(pop.concepts.size() == config.population_size + iterations);
  }
}

TEST_CASE("activation records are reproducible from the seed") {
  auto run = [] {
    CampaignConfig config = testing::example_config("minimalist");
    testing::MockOps ops(config);
    Population pop = initialized(config, ops.suite);
    std::vector<engine::IterationRecord> records;
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto act = engine::run_iteration(CampaignId("t"), pop.state, pop.concepts, {}, config,
                                             ops.suite, 11 + i);
      pop.concepts.emplace(act.offspring.id, act.offspring);
      pop.state = act.state;
      records.push_back(act.record);
    }
    return records;
  };
  const auto a = run();
  const auto b = run();
  CHECK(a == b);
  Json ja = a, jb = b;
  CHECK(ja.dump() == jb.dump());
  CHECK(engine::IterationRecord(ja[3]) == a[3]);
}

TEST_CASE("a failed activation leaves the campaign untouched") {
  CampaignConfig config = testing::example_config("minimalist");
  config.channel.immediate_mode = true;
  config.channel.kind = "web";
  config.backend.retry.backoff.clear();
  SwitchableBackend backend(7);
  ops::OperatorSuite suite(ops::load_templates(config.templates.init, config.templates.crossover,
                                               config.templates.mutation),
                           backend, ops::generation_settings(config), [](auto) {});
  feedback::WebChannel channel;
  feedback::VirtualClock clock;
  auto campaign = feedback::Campaign::create(CampaignId("t"), config,
                                             store::EventLog::in_memory(), suite, channel, clock);
  campaign->start();
  const auto before = campaign->snapshot();
  const auto log_before = campaign->log_contents();

  backend.failing = true;
  const std::size_t calls_before = backend.calls;
  try {
    campaign->activate();
    FAIL("activation succeeded on a dead backend");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBackendFailure);
  }
  CHECK(backend.calls - calls_before <= static_cast<std::size_t>(config.backend.retry.max_attempts) *
                                             (config.malformed_retries + 1) * 4);
  const auto after = campaign->snapshot();
  CHECK(after.population() == before.population());
  CHECK(after.digest() == before.digest());
  CHECK(campaign->log_contents() == log_before);

  backend.failing = false;
  campaign->activate();
  CHECK(campaign->snapshot().population().iteration == 1);
}
