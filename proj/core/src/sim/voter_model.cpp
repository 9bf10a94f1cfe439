#include "evoforge/sim/voter_model.hpp"

#include "evoforge/errors.hpp"
#include "evoforge/operators/mock_backend.hpp"

namespace evoforge::sim {

std::vector<ConfigViolation> validate_voter_model(const VoterModel& model) {
  std::vector<ConfigViolation> out;
  if (model.voters == 0) out.push_back({"voters", "must be at least 1"});
  if (!(model.theta_lo < model.theta_hi)) out.push_back({"theta_lo", "must be below theta_hi"});
  if (!(model.response_rate > 0.0 && model.response_rate <= 1.0)) {
    out.push_back({"response_rate", "must be in (0, 1]"});
  }
  if (model.taste_noise < 0.0) out.push_back({"taste_noise", "must be non-negative"});
  return out;
}

VoterModel voter_model_from_json(const Json& j) {
  VoterModel m;
  try {
    m.voters = j.value("voters", m.voters);
    if (j.contains("keyword_weights")) {
      m.keyword_weights = j.at("keyword_weights").get<std::map<std::string, double>>();
    }
    m.taste_noise = j.value("taste_noise", m.taste_noise);
    m.theta_lo = j.value("theta_lo", m.theta_lo);
    m.theta_hi = j.value("theta_hi", m.theta_hi);
    m.response_rate = j.value("response_rate", m.response_rate);
    m.seed = j.value("seed", m.seed);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("voter model: ") + e.what());
  }
  if (const auto violations = validate_voter_model(m); !violations.empty()) {
    std::string message = "voter model:";
    for (const auto& v : violations) message += " " + v.field + " " + v.rule + ";";
    throw Error(ErrorCode::kInvalidConfig, message);
  }
  return m;
}

Json voter_model_to_json(const VoterModel& m) {
  return Json{{"voters", m.voters},           {"keyword_weights", m.keyword_weights},
              {"taste_noise", m.taste_noise}, {"theta_lo", m.theta_lo},
              {"theta_hi", m.theta_hi},       {"response_rate", m.response_rate},
              {"seed", m.seed}};
}

VoterModel load_voter_model(const std::filesystem::path& path) {
  return voter_model_from_json(read_json_file(path));
}

std::set<std::string> concept_tokens(std::string_view body) {
  std::set<std::string> out;
  std::string word;
  for (char raw : body) {
    const char c = (raw >= 'A' && raw <= 'Z') ? static_cast<char>(raw - 'A' + 'a') : raw;
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      word.push_back(c);
    } else if (!word.empty()) {
      out.insert(word);
      word.clear();
    }
  }
  if (!word.empty()) out.insert(word);
  return out;
}

VoterPopulation::VoterPopulation(const VoterModel& model, std::uint64_t run_seed)
    : model_(model) {
  Rng rng(Rng::derive(model.seed, "voters", run_seed));
  shared_ = model.keyword_weights;
  if (shared_.empty()) {
    for (const std::string& k : ops::MockBackend::keyword_pool()) shared_[k] = rng.normal();
  }
  weights_.reserve(model.voters);
  for (std::size_t v = 0; v < model.voters; ++v) {
    std::map<std::string, double> w;
    for (const auto& [k, base] : shared_) w[k] = base + model.taste_noise * rng.normal();
    weights_.push_back(std::move(w));
  }
}

namespace {

double score(const std::map<std::string, double>& weights, std::string_view body) {
  double sum = 0.0;
  for (const std::string& token : concept_tokens(body)) {
    if (const auto it = weights.find(token); it != weights.end()) sum += it->second;
  }
  return sum;
}

}  // namespace

double VoterPopulation::utility(std::size_t voter, std::string_view body) const {
  return score(weights_.at(voter), body);
}

double VoterPopulation::hidden_utility(std::string_view body) const {
  return score(shared_, body);
}

VoteValue VoterPopulation::vote(std::size_t voter, std::string_view body) const {
  const double u = utility(voter, body);
  if (u > model_.theta_hi) return VoteValue::kPositive;
  if (u < model_.theta_lo) return VoteValue::kNegative;
  return VoteValue::kNeutral;
}

}  // namespace evoforge::sim
