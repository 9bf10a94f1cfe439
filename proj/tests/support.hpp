#pragma once

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "evoforge/domain.hpp"
#include "evoforge/operators/mock_backend.hpp"
#include "evoforge/operators/suite.hpp"
#include "evoforge/feedback/campaign.hpp"
#include "evoforge/feedback/web_channel.hpp"
#include "evoforge/serialization.hpp"
#include "evoforge/sim/simulator.hpp"
#include "evoforge/sim/voter_model.hpp"
#include "evoforge/store/event_log.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(EVOFORGE_SOURCE_DIR); }
inline fs::path fixture(const std::string& name) {
  return source_dir() / "tests" / "fixtures" / name;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot read " << path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// One of the shipped example configs (minimalist, boardgame, roots).
inline evoforge::CampaignConfig example_config(const std::string& name) {
  return evoforge::load_config_file(source_dir() / "assets" / "examples" / (name + ".json"));
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("evoforge-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Mock backend plus operator suite for a config.
struct MockOps {
  explicit MockOps(const evoforge::CampaignConfig& config)
      : backend(config.backend.mock_seed),
        suite(evoforge::ops::load_templates(config.templates.init, config.templates.crossover,
                                            config.templates.mutation),
              backend, evoforge::ops::generation_settings(config), [](auto) {}) {}

  evoforge::ops::MockBackend backend;
  evoforge::ops::OperatorSuite suite;
};

/// A started web campaign on a virtual clock; immediate mode publishes on
/// creation.
struct WebCampaign {
  explicit WebCampaign(evoforge::CampaignConfig c, bool immediate = true,
                       evoforge::store::EventLog log = evoforge::store::EventLog::in_memory())
      : config(adjust(std::move(c), immediate)), ops(config), clock(start_time()) {
    campaign = evoforge::feedback::Campaign::create(evoforge::CampaignId("demo"), config,
                                                    std::move(log), ops.suite, channel, clock);
    campaign->start();
  }

  static evoforge::Timestamp start_time() {
    return *evoforge::store::parse_timestamp("2026-01-05T06:00:00Z");
  }
  static evoforge::CampaignConfig adjust(evoforge::CampaignConfig c, bool immediate) {
    c.channel.kind = "web";
    c.channel.immediate_mode = immediate;
    return c;
  }
  /// Ids of the current members in population order.
  std::vector<evoforge::ConceptId> members() const {
    return campaign->snapshot().population().members;
  }

  evoforge::CampaignConfig config;
  MockOps ops;
  evoforge::feedback::WebChannel channel;
  evoforge::feedback::VirtualClock clock;
  std::unique_ptr<evoforge::feedback::Campaign> campaign;
};

inline evoforge::sim::VoterModel example_voters() {
  return evoforge::sim::load_voter_model(source_dir() / "assets" / "examples" / "voters.json");
}

/// A simulated minimalist campaign recorded into an in-memory log.
inline evoforge::sim::SimulationResult simulated_campaign(std::size_t iterations,
                                                          std::uint64_t seed,
                                                          const std::string& config = "minimalist") {
  evoforge::sim::SimulationOptions options;
  options.iterations = iterations;
  options.seed = seed;
  return evoforge::sim::simulate(example_config(config), example_voters(), options,
                                 evoforge::store::EventLog::in_memory());
}

inline std::string encode_all(const std::vector<evoforge::store::Event>& events) {
  std::string out;
  for (const auto& e : events) out += evoforge::store::encode_record(e);
  return out;
}

inline std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace testing
