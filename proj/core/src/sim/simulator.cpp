#include "evoforge/sim/simulator.hpp"

#include <sstream>

#include "evoforge/analytics/analytics.hpp"
#include "evoforge/errors.hpp"
#include "evoforge/factory.hpp"
#include "evoforge/feedback/campaign.hpp"
#include "evoforge/feedback/web_channel.hpp"
#include "evoforge/operators/suite.hpp"

namespace evoforge::sim {

Timestamp simulation_epoch() { return *store::parse_timestamp("2026-01-05T00:00:00Z"); }

std::string SimulationSummary::to_text() const {
  std::ostringstream out;
  out << "iterations: " << iterations << "\n"
      << "concepts_created: " << concepts_created << "\n"
      << "accepted_votes: " << accepted_votes << "\n"
      << "published: " << published << "\n"
      << "state_digest: " << state_digest << "\n"
      << "initial_mean_utility: " << analytics::format_number(initial_mean_utility()) << "\n"
      << "final_mean_utility: " << analytics::format_number(final_mean_utility()) << "\n"
      << "mean_utility_per_activation:";
  for (std::size_t i = 0; i < mean_utility.size(); ++i) {
    out << (i == 0 ? " " : ",") << analytics::format_number(mean_utility[i]);
  }
  out << "\n";
  return out.str();
}

namespace {

double population_utility(const store::CampaignState& state, const VoterPopulation& voters) {
  const auto& members = state.population().members;
  double total = 0.0;
  for (const ConceptId& id : members) total += voters.hidden_utility(state.find(id)->body);
  return members.empty() ? 0.0 : total / static_cast<double>(members.size());
}

}  // namespace

SimulationResult simulate(const CampaignConfig& base_config, const VoterModel& model,
                          const SimulationOptions& options, store::EventLog log) {
  CampaignConfig config = base_config;
  config.rng_seed = options.seed;
  config.max_iterations = options.iterations;

  const auto backend = make_backend(config.backend);
  ops::OperatorSuite suite(load_campaign_templates(config), *backend,
                           ops::generation_settings(config));
  feedback::WebChannel channel;
  feedback::VirtualClock clock(simulation_epoch());
  const feedback::PublishSchedule schedule = feedback::PublishSchedule::from_config(config);
  const VoterPopulation voters(model, options.seed);

  auto campaign = feedback::Campaign::create(CampaignId(options.campaign_id), config,
                                             std::move(log), suite, channel, clock);
  campaign->start();

  SimulationSummary summary;
  summary.mean_utility.push_back(
      campaign->read([&](const store::CampaignState& s) { return population_utility(s, voters); }));

  std::vector<VoterToken> tokens;
  std::vector<std::string> refs;
  for (std::size_t v = 0; v < voters.size(); ++v) {
    refs.push_back("voter-" + std::to_string(v));
    tokens.push_back(campaign->token_for(refs.back()));
  }

  Rng rng(Rng::derive(options.seed, "simulation"));
  auto iteration = [&] {
    return campaign->read([](const store::CampaignState& s) { return s.population().iteration; });
  };
  std::size_t idle_slots = 0;
  while (static_cast<std::size_t>(iteration()) < options.iterations) {
    if (schedule.immediate()) {
      clock.advance(std::chrono::hours(1));
    } else {
      clock.set(schedule.next_slot(clock.now() + std::chrono::seconds(1)));
    }
    campaign->publish_due();

    struct Ballot {
      ConceptId concept_id;
      std::size_t voter;
    };
    std::vector<Ballot> ballots;
    campaign->read([&](const store::CampaignState& s) {
      for (const ConceptId& id : s.creation_order()) {
        if (s.find(id)->status != ConceptStatus::kActivePublished) continue;
        for (std::size_t v = 0; v < voters.size(); ++v) {
          if (!s.has_voted(id, tokens[v]) && rng.bernoulli(model.response_rate)) {
            ballots.push_back({id, v});
          }
        }
      }
      return 0;
    });
    for (std::size_t i = ballots.size(); i > 1; --i) {
      std::swap(ballots[i - 1], ballots[rng.uniform_index(i)]);
    }

    bool progress = false;
    for (const Ballot& b : ballots) {
      if (static_cast<std::size_t>(iteration()) >= options.iterations) break;
      const auto body = campaign->read([&](const store::CampaignState& s) -> std::optional<std::string> {
        const GameConcept* c = s.find(b.concept_id);
        if (c->status != ConceptStatus::kActivePublished) return std::nullopt;
        return c->body;
      });
      if (!body) continue;
      const auto result = campaign->ingest_vote(refs[b.voter], b.concept_id,
                                                voters.vote(b.voter, *body));
      if (result.outcome == feedback::IngestOutcome::kAccepted) progress = true;
      if (campaign->maybe_activate()) {
        progress = true;
        summary.mean_utility.push_back(campaign->read(
            [&](const store::CampaignState& s) { return population_utility(s, voters); }));
      }
    }
    if (progress) {
      idle_slots = 0;
    } else if (++idle_slots > options.stall_slots) {
      throw Error(ErrorCode::kSimulationStalled,
                  "no votes or activations for " + std::to_string(options.stall_slots) +
                      " slots at iteration " + std::to_string(iteration()) +
                      "; add voters or lower trigger_new_evals");
    }
  }
  campaign->stop();

  const store::CampaignState state = campaign->snapshot();
  summary.iterations = static_cast<std::size_t>(state.population().iteration);
  summary.concepts_created = state.total_concepts();
  summary.accepted_votes = state.accepted_votes().size();
  summary.published = state.receipts().size();
  summary.state_digest = state.digest();

  SimulationResult result;
  result.summary = std::move(summary);
  result.events = store::read_log(campaign->log_contents());
  return result;
}

}  // namespace evoforge::sim
