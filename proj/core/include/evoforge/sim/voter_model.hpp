#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/rng.hpp"
#include "evoforge/serialization.hpp"

namespace evoforge::sim {

/// Synthetic participants. Each voter scores a concept by summing its weights
/// over the distinct keywords the concept mentions, then votes +1 above
/// theta_hi, -1 below theta_lo, 0 otherwise.
struct VoterModel {
  std::size_t voters = 40;
  /// Shared taste; empty means "draw one N(0,1) weight per mock keyword".
  std::map<std::string, double> keyword_weights;
  /// Standard deviation of each voter's deviation from the shared taste.
  double taste_noise = 0.3;
  double theta_lo = -0.5;
  double theta_hi = 0.5;
  /// Probability that a voter evaluates a given concept during one slot.
  double response_rate = 0.5;
  std::uint64_t seed = 1;
};

std::vector<ConfigViolation> validate_voter_model(const VoterModel& model);

VoterModel voter_model_from_json(const Json& j);
Json voter_model_to_json(const VoterModel& model);
VoterModel load_voter_model(const std::filesystem::path& path);

/// Distinct lowercase alphanumeric tokens of a concept body.
std::set<std::string> concept_tokens(std::string_view body);

/// Concrete voters drawn from a model.
class VoterPopulation {
 public:
  /// `run_seed` is mixed with model.seed so one model file serves many runs.
  VoterPopulation(const VoterModel& model, std::uint64_t run_seed);

  std::size_t size() const noexcept { return weights_.size(); }
  const std::map<std::string, double>& shared_weights() const noexcept { return shared_; }

  double utility(std::size_t voter, std::string_view body) const;
  /// Utility under the shared taste (the quantity selection should raise).
  double hidden_utility(std::string_view body) const;
  VoteValue vote(std::size_t voter, std::string_view body) const;

 private:
  VoterModel model_;
  std::map<std::string, double> shared_;
  std::vector<std::map<std::string, double>> weights_;
};

}  // namespace evoforge::sim
