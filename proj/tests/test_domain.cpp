#include "support.hpp"

#include <algorithm>
#include <map>

#include "evoforge/errors.hpp"
#include "evoforge/rng.hpp"
#include "evoforge/text.hpp"

using namespace evoforge;

namespace {

bool has_violation(const std::vector<ConfigViolation>& v, const std::string& field) {
  return std::any_of(v.begin(), v.end(), [&](const ConfigViolation& c) { return c.field == field; });
}

GameConcept plain_concept(Origin origin, std::vector<ConceptId> parents) {
  GameConcept c;
  c.id = ConceptId("c-001");
  c.campaign_id = CampaignId("c");
  c.origin = origin;
  c.parent_ids = std::move(parents);
  c.sections = {{"name", "Echo", 0}, {"concept", "short", 10}};
  c.body = "name: Echo";
  return c;
}

}  // namespace

TEST_CASE("validate_config accepts the published defaults") {
  CampaignConfig config;
  CHECK(config.population_size == 10);
  CHECK(config.tournament_size == 2);
  CHECK(config.recombination_prob == doctest::Approx(0.7));
  CHECK(config.trigger_new_evals == 25);
  CHECK(validate_config(config).empty());
}

TEST_CASE("validate_config names each broken rule once") {
  CampaignConfig config;
  config.population_size = 1;
  auto v = validate_config(config);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "population_size");

  config = CampaignConfig{};
  config.recombination_prob = 1.3;
  v = validate_config(config);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "recombination_prob");

  config = CampaignConfig{};
  config.trigger_new_evals = 0;
  config.mutation_focus_list.clear();
  config.tournament_size = 1;
  v = validate_config(config);
  CHECK(has_violation(v, "trigger_new_evals"));
  CHECK(has_violation(v, "mutation_focus_list"));
  CHECK(has_violation(v, "tournament_size"));

  config = CampaignConfig{};
  config.publish_slots = {{12, 0}, {9, 0}};
  CHECK(has_violation(validate_config(config), "publish_slots"));
}

TEST_CASE("effective_evaluations keeps the latest value per voter") {
  const ConceptId x("x");
  const VoterToken u1("u1"), u2("u2"), u3("u3");
  std::vector<Evaluation> evals{{u1, x, VoteValue::kPositive, {}},
                                {u1, x, VoteValue::kNegative, {}}};
  auto m = effective_evaluations(evals, x);
  REQUIRE(m.size() == 1);
  CHECK(m.at(u1) == VoteValue::kNegative);

  CHECK(effective_evaluations({}, x).empty());

  evals = {{u1, x, VoteValue::kPositive, {}},
           {u2, x, VoteValue::kNeutral, {}},
           {u3, x, VoteValue::kNegative, {}}};
  m = effective_evaluations(evals, x);
  CHECK(m.size() == 3);
  int sum = 0;
  for (const auto& [voter, value] : m) sum += to_int(value);
  CHECK(sum == 0);
}

TEST_CASE("effective_evaluations matches a last-write oracle and is replay idempotent") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Evaluation> evals;
    const int n = static_cast<int>(gen() % 40);
    for (int i = 0; i < n; ++i) {
      evals.push_back({VoterToken("u" + std::to_string(gen() % 5)),
                       ConceptId(gen() % 2 ? "a" : "b"),
                       static_cast<VoteValue>(static_cast<int>(gen() % 3) - 1),
                       {}});
    }
    // Oracle: scan backwards, first hit per voter wins.
    std::map<VoterToken, VoteValue> oracle;
    for (auto it = evals.rbegin(); it != evals.rend(); ++it) {
      if (it->concept_id == ConceptId("a")) oracle.emplace(it->voter, it->value);
    }
    const auto once = effective_evaluations(evals, ConceptId("a"));
    CHECK(once == VoteMap(oracle.begin(), oracle.end()));

    std::vector<Evaluation> twice = evals;
    twice.insert(twice.end(), evals.begin(), evals.end());
    CHECK(effective_evaluations(twice, ConceptId("a")) == once);
  }
}

TEST_CASE("vote values are exactly -1, 0, +1") {
  CHECK(vote_value_from_int(-1) == VoteValue::kNegative);
  CHECK(vote_value_from_int(0) == VoteValue::kNeutral);
  CHECK(vote_value_from_int(1) == VoteValue::kPositive);
  CHECK_FALSE(vote_value_from_int(2).has_value());
  CHECK_FALSE(vote_value_from_int(-2).has_value());
}

TEST_CASE("concept invariants tie origin to parent arity") {
  CHECK(concept_violations(plain_concept(Origin::kLlmRandom, {})).empty());
  CHECK(concept_violations(plain_concept(Origin::kHumanSeed, {})).empty());
  CHECK(concept_violations(plain_concept(Origin::kMutation, {ConceptId("p")})).empty());
  CHECK(concept_violations(
            plain_concept(Origin::kRecombination, {ConceptId("p"), ConceptId("q")}))
            .empty());

  CHECK(concept_violations(plain_concept(Origin::kLlmRandom, {ConceptId("p")})).size() == 1);
  CHECK(concept_violations(plain_concept(Origin::kMutation, {})).size() == 1);
  CHECK(concept_violations(
            plain_concept(Origin::kRecombination, {ConceptId("p"), ConceptId("p")}))
            .size() == 1);
  CHECK(concept_violations(plain_concept(Origin::kRecombination, {ConceptId("p")})).size() == 1);
}

TEST_CASE("section length tolerance band is 1.25 times the limit") {
  GameConcept c = plain_concept(Origin::kLlmRandom, {});
  c.sections = {{"concept", std::string(125, 'a'), 100}};
  CHECK(concept_violations(c).empty());
  c.sections[0].text.push_back('a');
  CHECK(concept_violations(c).size() == 1);
  // Code points, not bytes.
  c.sections[0].text.clear();
  for (int i = 0; i < 125; ++i) c.sections[0].text += "\xC3\xA8";
  CHECK(concept_violations(c).empty());
}

TEST_CASE("status only moves forward") {
  const std::vector<ConceptStatus> all{ConceptStatus::kActiveUnpublished,
                                       ConceptStatus::kActivePublished, ConceptStatus::kRetired};
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      CHECK(can_transition(all[i], all[j]) == (j > i));
    }
  }
  GameConcept c = plain_concept(Origin::kLlmRandom, {});
  advance_status(c, ConceptStatus::kActivePublished);
  advance_status(c, ConceptStatus::kRetired);
  try {
    advance_status(c, ConceptStatus::kActivePublished);
    FAIL("backwards transition accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidTransition);
  }
}

TEST_CASE("status monotonicity holds for random command interleavings") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 500; ++trial) {
    GameConcept c = plain_concept(Origin::kLlmRandom, {});
    int last = 0;
    for (int step = 0; step < 6; ++step) {
      const auto to = static_cast<ConceptStatus>(gen() % 3);
      try {
        advance_status(c, to);
      } catch (const Error&) {
      }
      CHECK(static_cast<int>(c.status) >= last);
      last = static_cast<int>(c.status);
    }
  }
}

TEST_CASE("config document round-trips through JSON") {
  CampaignConfig config = testing::example_config("roots");
  config.max_iterations = 15;
  config.seed_concepts = {"one", "two"};
  config.init_mode = InitMode::kMixed;
  const CampaignConfig back = config_from_json(config_to_json(config));
  CHECK(config_to_json(back) == config_to_json(config));
  CHECK(back.interpretations.size() == 4);
  CHECK(back.max_iterations == std::optional<std::size_t>(15));
  CHECK(back.publish_slots.size() == 3);
}

TEST_CASE("config errors name the offending field") {
  try {
    config_from_json(Json{{"population_size", "ten"}});
    FAIL("type error accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidConfig);
    CHECK(std::string(e.what()).find("population_size") != std::string::npos);
  }
  try {
    config_from_json(Json{{"publish_slots", {"25:00"}}});
    FAIL("bad slot accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("publish_slots") != std::string::npos);
  }
}

TEST_CASE("relative template paths resolve against the config file") {
  const CampaignConfig config = testing::example_config("minimalist");
  CHECK(std::filesystem::exists(config.templates.init));
  CHECK(std::filesystem::exists(config.templates.crossover));
  CHECK(std::filesystem::exists(config.templates.mutation));
}

TEST_CASE("time of day parsing") {
  CHECK(parse_time_of_day("09:00") == TimeOfDay{9, 0});
  CHECK(parse_time_of_day("17:30") == TimeOfDay{17, 30});
  CHECK_FALSE(parse_time_of_day("24:00").has_value());
  CHECK_FALSE(parse_time_of_day("9").has_value());
  CHECK_FALSE(parse_time_of_day("09:60").has_value());
  CHECK(to_string(TimeOfDay{9, 5}) == "09:05");
}

TEST_CASE("text helpers") {
  CHECK(text::utf8_length("caf\xC3\xA9") == 4);
  CHECK(text::normalize_body("  Hello\n\tWORLD  ") == "hello world");
  CHECK(text::truncate_at_sentence("One. Two three. Four", 16) == "One. Two three.");
  CHECK(text::truncate_at_sentence("alpha beta gamma", 12) == "alpha beta");
  CHECK(text::truncate_at_sentence("short", 10) == "short");
  CHECK(text::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("rng streams are deterministic and bounded draws are uniform") {
  Rng a(Rng::derive(5, "activation", 3));
  Rng b(Rng::derive(5, "activation", 3));
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  CHECK(Rng::derive(5, "activation", 3) != Rng::derive(5, "activation", 4));
  CHECK(Rng::derive(5, "activation", 3) != Rng::derive(5, "init", 3));

  Rng r(99);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(7)];
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
  double chi = 0;
  for (int c : counts) chi += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi < 22.46);

  double sum = 0;
  for (int i = 0; i < 20000; ++i) sum += r.normal();
  CHECK(std::abs(sum / 20000) < 0.03);
}
