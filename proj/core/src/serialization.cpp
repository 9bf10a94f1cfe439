#include "evoforge/serialization.hpp"

#include <fstream>
#include <sstream>

#include "evoforge/errors.hpp"

namespace evoforge {

void to_json(Json& j, const Section& s) {
  j = Json{{"label", s.label}, {"text", s.text}, {"char_limit", s.char_limit}};
}

void from_json(const Json& j, Section& s) {
  s.label = j.at("label").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.char_limit = j.value("char_limit", std::size_t{0});
}

void to_json(Json& j, const GameConcept& c) {
  Json parents = Json::array();
  for (const ConceptId& p : c.parent_ids) parents.push_back(p.str());
  j = Json{{"concept_id", c.id.str()},
           {"campaign_id", c.campaign_id.str()},
           {"body", c.body},
           {"sections", c.sections},
           {"origin", to_string(c.origin)},
           {"parent_ids", parents},
           {"mutation_focus", c.mutation_focus ? Json(*c.mutation_focus) : Json(nullptr)},
           {"created_at_iteration", c.created_at_iteration},
           {"status", to_string(c.status)}};
}

void from_json(const Json& j, GameConcept& c) {
  c.id = ConceptId(j.at("concept_id").get<std::string>());
  c.campaign_id = CampaignId(j.at("campaign_id").get<std::string>());
  c.body = j.at("body").get<std::string>();
  c.sections = j.at("sections").get<std::vector<Section>>();
  c.origin = origin_from_string(j.at("origin").get<std::string>());
  c.parent_ids.clear();
  for (const Json& p : j.at("parent_ids")) c.parent_ids.emplace_back(p.get<std::string>());
  const Json& focus = j.at("mutation_focus");
  c.mutation_focus = focus.is_null() ? std::nullopt
                                     : std::optional<std::string>(focus.get<std::string>());
  c.created_at_iteration = j.at("created_at_iteration").get<std::int64_t>();
  c.status = status_from_string(j.at("status").get<std::string>());
}

void to_json(Json& j, const PopulationState& p) {
  Json members = Json::array();
  for (const ConceptId& m : p.members) members.push_back(m.str());
  j = Json{{"members", members},
           {"iteration", p.iteration},
           {"evals_since_last_activation", p.evals_since_last_activation}};
}

void from_json(const Json& j, PopulationState& p) {
  p.members.clear();
  for (const Json& m : j.at("members")) p.members.emplace_back(m.get<std::string>());
  p.iteration = j.at("iteration").get<std::int64_t>();
  p.evals_since_last_activation = j.at("evals_since_last_activation").get<std::size_t>();
}

Json config_to_json(const CampaignConfig& config) {
  Json slots = Json::array();
  for (const TimeOfDay& t : config.publish_slots) slots.push_back(to_string(t));
  Json backoff = Json::array();
  for (auto d : config.backend.retry.backoff) backoff.push_back(d.count());

  const BackendSettings& b = config.backend;
  const ChannelSettings& ch = config.channel;
  return Json{
      {"brief", config.brief},
      {"init_mode", to_string(config.init_mode)},
      {"seed_concepts", config.seed_concepts},
      {"interpretations", config.interpretations},
      {"population_size", config.population_size},
      {"tournament_size", config.tournament_size},
      {"recombination_prob", config.recombination_prob},
      {"mutation_focus_list", config.mutation_focus_list},
      {"trigger_new_evals", config.trigger_new_evals},
      {"min_evals_per_published", config.min_evals_per_published},
      {"publish_slots", slots},
      {"max_iterations",
       config.max_iterations ? Json(*config.max_iterations) : Json(nullptr)},
      {"rng_seed", config.rng_seed},
      {"degenerate_retries", config.degenerate_retries},
      {"malformed_retries", config.malformed_retries},
      {"backend",
       {{"kind", b.kind},
        {"name", b.name},
        {"mock_seed", b.mock_seed},
        {"base_url", b.base_url},
        {"endpoint_path", b.endpoint_path},
        {"model", b.model},
        {"api_key_env", b.api_key_env},
        {"retry", {{"max_attempts", b.retry.max_attempts}, {"backoff_ms", backoff}}},
        {"timeout_ms", b.timeout.count()},
        {"temperature", b.temperature},
        {"max_length", b.max_length}}},
      {"channel",
       {{"kind", ch.kind},
        {"timezone", ch.timezone},
        {"immediate_mode", ch.immediate_mode},
        {"chat_id", ch.chat_id},
        {"bot_token_env", ch.bot_token_env},
        {"api_base", ch.api_base},
        {"max_message_length", ch.max_message_length},
        {"voter_salt", ch.voter_salt}}},
      {"templates",
       {{"init", config.templates.init},
        {"crossover", config.templates.crossover},
        {"mutation", config.templates.mutation}}},
  };
}

namespace {

template <typename T>
void read_field(const Json& j, const char* key, T& out, const std::string& prefix = "") {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, "field '" + prefix + key + "': " + e.what());
  }
}

}  // namespace

CampaignConfig config_from_json(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "configuration must be an object");
  }
  CampaignConfig c;
  read_field(j, "brief", c.brief);
  if (j.contains("init_mode")) {
    std::string mode;
    read_field(j, "init_mode", mode);
    c.init_mode = init_mode_from_string(mode);
  }
  read_field(j, "seed_concepts", c.seed_concepts);
  read_field(j, "interpretations", c.interpretations);
  read_field(j, "population_size", c.population_size);
  read_field(j, "tournament_size", c.tournament_size);
  read_field(j, "recombination_prob", c.recombination_prob);
  read_field(j, "mutation_focus_list", c.mutation_focus_list);
  read_field(j, "trigger_new_evals", c.trigger_new_evals);
  read_field(j, "min_evals_per_published", c.min_evals_per_published);
  if (j.contains("publish_slots")) {
    std::vector<std::string> slots;
    read_field(j, "publish_slots", slots);
    c.publish_slots.clear();
    for (const std::string& s : slots) {
      auto t = parse_time_of_day(s);
      if (!t) throw Error(ErrorCode::kInvalidConfig, "field 'publish_slots': bad time '" + s + "'");
      c.publish_slots.push_back(*t);
    }
  }
  if (j.contains("max_iterations") && !j.at("max_iterations").is_null()) {
    std::size_t n = 0;
    read_field(j, "max_iterations", n);
    c.max_iterations = n;
  }
  read_field(j, "rng_seed", c.rng_seed);
  read_field(j, "degenerate_retries", c.degenerate_retries);
  read_field(j, "malformed_retries", c.malformed_retries);

  if (j.contains("backend")) {
    const Json& b = j.at("backend");
    const std::string p = "backend.";
    read_field(b, "kind", c.backend.kind, p);
    read_field(b, "name", c.backend.name, p);
    read_field(b, "mock_seed", c.backend.mock_seed, p);
    read_field(b, "base_url", c.backend.base_url, p);
    read_field(b, "endpoint_path", c.backend.endpoint_path, p);
    read_field(b, "model", c.backend.model, p);
    read_field(b, "api_key_env", c.backend.api_key_env, p);
    if (b.contains("retry")) {
      const Json& r = b.at("retry");
      read_field(r, "max_attempts", c.backend.retry.max_attempts, p + "retry.");
      if (r.contains("backoff_ms")) {
        std::vector<long long> ms;
        read_field(r, "backoff_ms", ms, p + "retry.");
        c.backend.retry.backoff.clear();
        for (long long v : ms) c.backend.retry.backoff.emplace_back(v);
      }
    }
    long long timeout_ms = c.backend.timeout.count();
    read_field(b, "timeout_ms", timeout_ms, p);
    c.backend.timeout = std::chrono::milliseconds{timeout_ms};
    read_field(b, "temperature", c.backend.temperature, p);
    read_field(b, "max_length", c.backend.max_length, p);
  }
  if (j.contains("channel")) {
    const Json& ch = j.at("channel");
    const std::string p = "channel.";
    read_field(ch, "kind", c.channel.kind, p);
    read_field(ch, "timezone", c.channel.timezone, p);
    read_field(ch, "immediate_mode", c.channel.immediate_mode, p);
    read_field(ch, "chat_id", c.channel.chat_id, p);
    read_field(ch, "bot_token_env", c.channel.bot_token_env, p);
    read_field(ch, "api_base", c.channel.api_base, p);
    read_field(ch, "max_message_length", c.channel.max_message_length, p);
    read_field(ch, "voter_salt", c.channel.voter_salt, p);
  }
  if (j.contains("templates")) {
    const Json& t = j.at("templates");
    read_field(t, "init", c.templates.init, "templates.");
    read_field(t, "crossover", c.templates.crossover, "templates.");
    read_field(t, "mutation", c.templates.mutation, "templates.");
  }
  return c;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
}

CampaignConfig load_config_file(const std::filesystem::path& path) {
  CampaignConfig config = config_from_json(read_json_file(path));
  const auto base = path.parent_path();
  for (std::string* p : {&config.templates.init, &config.templates.crossover,
                         &config.templates.mutation}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) {
      *p = (base / *p).lexically_normal().string();
    }
  }
  return config;
}

}  // namespace evoforge
