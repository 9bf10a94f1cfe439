#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/serialization.hpp"
#include "evoforge/sim/voter_model.hpp"
#include "evoforge/store/event_log.hpp"

namespace evoforge::sim {

struct SimulationOptions {
  std::size_t iterations = 30;
  std::uint64_t seed = 0;
  /// Consecutive slots without an accepted vote or activation before giving up.
  std::size_t stall_slots = 50;
  std::string campaign_id = "sim";
};

struct SimulationSummary {
  std::size_t iterations = 0;
  std::size_t concepts_created = 0;
  std::size_t accepted_votes = 0;
  std::size_t published = 0;
  std::string state_digest;
  /// Mean hidden utility of the population: [0] after initialization, then
  /// one entry per activation.
  std::vector<double> mean_utility;

  double initial_mean_utility() const { return mean_utility.front(); }
  double final_mean_utility() const { return mean_utility.back(); }
  /// "key: value" lines.
  std::string to_text() const;
};

struct SimulationResult {
  SimulationSummary summary;
  std::vector<store::Event> events;
};

/// Runs a campaign against synthetic voters on a virtual clock until exactly
/// `options.iterations` activations have completed. Every slot each voter
/// evaluates each published concept it has not yet judged with probability
/// response_rate, in a seeded random order; the trigger is checked after
/// every vote. Throws Error(kSimulationStalled) when voting dries up.
///
/// The config's rng_seed is replaced by options.seed; the channel is a silent
/// web channel whatever the config says.
SimulationResult simulate(const CampaignConfig& config, const VoterModel& voters,
                          const SimulationOptions& options, store::EventLog log);

/// Fixed virtual start instant of every simulation.
Timestamp simulation_epoch();

}  // namespace evoforge::sim
