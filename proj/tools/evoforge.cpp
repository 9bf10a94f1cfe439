// evoforge: run campaigns, simulate them with synthetic voters, replay and
// export event logs.
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime error, 4 corrupt log.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "evoforge/analytics/analytics.hpp"
#include "evoforge/api/registry.hpp"
#include "evoforge/api/service.hpp"
#include "evoforge/errors.hpp"
#include "evoforge/feedback/console_channel.hpp"
#include "evoforge/serialization.hpp"
#include "evoforge/sim/simulator.hpp"
#include "evoforge/store/campaign_state.hpp"
#include "evoforge/store/event_log.hpp"

namespace fs = std::filesystem;
using namespace evoforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitCorrupt = 4;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct ServiceSettings {
  std::string campaign_id;
  fs::path log_dir;
  std::string api_host = "127.0.0.1";
  int api_port = 0;
  std::string admin_token_env = "EVOFORGE_ADMIN_TOKEN";
  int tick_ms = 1000;
};

ServiceSettings service_settings(const fs::path& config_path) {
  const Json doc = read_json_file(config_path);
  ServiceSettings s;
  s.campaign_id = config_path.stem().string();
  s.log_dir = "logs";
  if (doc.contains("service")) {
    const Json& j = doc.at("service");
    try {
      s.campaign_id = j.value("campaign_id", s.campaign_id);
      s.log_dir = j.value("log_dir", s.log_dir.string());
      s.api_host = j.value("api_host", s.api_host);
      s.api_port = j.value("api_port", s.api_port);
      s.admin_token_env = j.value("admin_token_env", s.admin_token_env);
      s.tick_ms = j.value("tick_ms", s.tick_ms);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, std::string("service: ") + e.what());
    }
  }
  if (s.log_dir.is_relative()) s.log_dir = config_path.parent_path() / s.log_dir;
  return s;
}

/// Loads and validates a campaign config, printing every violation.
CampaignConfig checked_config(const fs::path& path) {
  CampaignConfig config = load_config_file(path);
  if (const auto violations = validate_config(config); !violations.empty()) {
    std::ostringstream out;
    out << path.string() << ": " << violations.size() << " violation(s)";
    for (const auto& v : violations) out << "\n  " << v.field << ": " << v.rule;
    throw Error(ErrorCode::kInvalidConfig, out.str());
  }
  return config;
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string status_line(const feedback::Campaign& campaign) {
  const std::size_t queued = campaign.queue().size();
  return campaign.read([&](const store::CampaignState& s) {
    std::ostringstream out;
    out << "campaign " << s.id().str() << ": " << to_string(s.lifecycle()) << ", iteration "
        << s.population().iteration << ", concepts " << s.total_concepts() << ", published "
        << s.receipts().size() << ", queued " << queued << ", accepted votes "
        << s.accepted_votes().size();
    return out.str();
  });
}

int cmd_run(const fs::path& config_path, std::size_t ticks, std::optional<int> port) {
  const CampaignConfig config = checked_config(config_path);
  ServiceSettings settings = service_settings(config_path);
  if (port) settings.api_port = *port;

  feedback::SystemClock clock;
  api::CampaignRegistry registry({settings.log_dir, true, &std::cout, nullptr}, clock);
  registry.resume_all();
  feedback::Campaign& campaign = registry.open(CampaignId(settings.campaign_id), config);
  const bool running = campaign.read(
      [](const store::CampaignState& s) { return s.lifecycle() == store::Lifecycle::kRunning; });
  if (!running) campaign.start();
  std::cout << status_line(campaign) << std::endl;

  std::unique_ptr<api::ApiService> service;
  std::unique_ptr<api::ApiServer> server;
  if (settings.api_port > 0) {
    const char* token = std::getenv(settings.admin_token_env.c_str());
    service = std::make_unique<api::ApiService>(
        registry, api::ServiceOptions{token ? token : "", std::chrono::seconds(3600)});
    server = std::make_unique<api::ApiServer>(*service);
    const int bound = server->start(settings.api_host, settings.api_port);
    std::cout << "api listening on " << settings.api_host << ":" << bound << std::endl;
  }

  // Console votes typed on stdin use the VOTE line protocol.
  if (config.channel.kind == "console") {
    std::thread([&campaign] {
      std::string line;
      while (!g_stop && std::getline(std::cin, line)) {
        const auto vote = feedback::parse_vote_line(line);
        if (!vote || !vote->concept_id) {
          std::cout << "ignored: " << line << std::endl;
          continue;
        }
        const auto result = campaign.ingest_vote(vote->user_ref, *vote->concept_id, vote->value);
        std::cout << "vote " << vote->concept_id->str() << ": " << to_string(result.outcome)
                  << (result.reason.empty() ? "" : " (" + result.reason + ")") << std::endl;
      }
    }).detach();
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::string last_status = status_line(campaign);
  for (std::size_t t = 0; !g_stop && (ticks == 0 || t < ticks); ++t) {
    registry.tick_all(&std::cerr);
    if (auto err = campaign.last_channel_error()) std::cerr << "channel: " << *err << std::endl;
    const std::string status = status_line(campaign);
    if (status != last_status) {
      std::cout << status << std::endl;
      last_status = status;
    }
    if (ticks == 0 || t + 1 < ticks) {
      std::this_thread::sleep_for(std::chrono::milliseconds(settings.tick_ms));
    }
  }
  if (server) server->stop();
  std::cout << status_line(campaign) << std::endl;
  return kExitOk;
}

int cmd_simulate(const fs::path& config_path, const fs::path& voters_path,
                 std::size_t iterations, std::uint64_t seed, const fs::path& out_dir,
                 const std::optional<fs::path>& stopwords_path) {
  const CampaignConfig config = checked_config(config_path);
  const sim::VoterModel voters = sim::load_voter_model(voters_path);
  fs::create_directories(out_dir);
  const fs::path log_path = out_dir / "events.log";
  fs::remove(log_path);

  sim::SimulationOptions options;
  options.iterations = iterations;
  options.seed = seed;
  const sim::SimulationResult result =
      sim::simulate(config, voters, options, store::EventLog::open_file(log_path, false));

  const std::set<std::string> stopwords =
      stopwords_path ? analytics::load_stopwords(*stopwords_path) : std::set<std::string>{};
  write_file(out_dir / "timeline.csv",
             analytics::timeline_csv(analytics::eval_timeline(result.events, std::chrono::hours(1))));
  write_file(out_dir / "lengths.csv", analytics::lengths_csv(analytics::length_series(result.events)));
  write_file(out_dir / "words_initial.csv",
             analytics::words_csv(analytics::word_frequencies(
                 analytics::population_bodies(result.events, analytics::PopulationView::kInitial),
                 stopwords)));
  write_file(out_dir / "words_final.csv",
             analytics::words_csv(analytics::word_frequencies(
                 analytics::population_bodies(result.events, analytics::PopulationView::kFinal),
                 stopwords)));
  const std::string summary = result.summary.to_text();
  write_file(out_dir / "summary.txt", summary);
  std::cout << summary;
  return kExitOk;
}

std::vector<store::Event> load_log(const fs::path& path) {
  return store::read_log(read_file(path));
}

int cmd_replay(const fs::path& log_path) {
  const std::vector<store::Event> events = load_log(log_path);
  const store::CampaignState state = store::replay(events);
  std::cout << "campaign_id: " << state.id().str() << "\n"
            << "lifecycle: " << to_string(state.lifecycle()) << "\n"
            << "events: " << events.size() << "\n"
            << "iterations: " << state.population().iteration << "\n"
            << "concepts_created: " << state.total_concepts() << "\n"
            << "accepted_votes: " << state.accepted_votes().size() << "\n"
            << "published: " << state.receipts().size() << "\n"
            << "uncommitted_events: " << state.pending() << "\n"
            << "state_digest: " << state.digest() << "\n";
  return kExitOk;
}

int cmd_export(const fs::path& log_path, const std::string& what,
               const std::optional<fs::path>& out_path, long long bucket_seconds,
               const std::optional<fs::path>& stopwords_path, const std::string& population) {
  const std::vector<store::Event> events = load_log(log_path);
  std::string csv;
  if (what == "timeline") {
    csv = analytics::timeline_csv(
        analytics::eval_timeline(events, std::chrono::seconds(bucket_seconds)));
  } else if (what == "lengths") {
    csv = analytics::lengths_csv(analytics::length_series(events));
  } else {
    const std::set<std::string> stopwords =
        stopwords_path ? analytics::load_stopwords(*stopwords_path) : std::set<std::string>{};
    const auto view = population == "initial" ? analytics::PopulationView::kInitial
                                              : analytics::PopulationView::kFinal;
    csv = analytics::words_csv(
        analytics::word_frequencies(analytics::population_bodies(events, view), stopwords));
  }
  if (out_path) {
    write_file(*out_path, csv);
  } else {
    std::cout << csv;
  }
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidTemplate:
    case ErrorCode::kMissingInterpretationList:
    case ErrorCode::kSeedCountMismatch:
    case ErrorCode::kAuthError:
      return kExitConfig;
    case ErrorCode::kCorruptLog:
      return kExitCorrupt;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evoforge: interactive evolution of game concepts"};
  app.require_subcommand(1);

  fs::path config_path;
  std::size_t ticks = 0;
  std::optional<int> port;
  auto* run = app.add_subcommand("run", "Run a campaign service until interrupted");
  run->add_option("--config", config_path, "Campaign config (JSON)")->required();
  run->add_option("--ticks", ticks, "Stop after this many scheduler ticks (0 = never)");
  run->add_option("--port", port, "Serve the REST API on this port");

  fs::path voters_path;
  std::size_t iterations = 30;
  std::uint64_t seed = 0;
  fs::path out_dir = "sim-out";
  std::optional<fs::path> stopwords;
  auto* simulate = app.add_subcommand("simulate", "Simulate a campaign with synthetic voters");
  simulate->add_option("--config", config_path, "Campaign config (JSON)")->required();
  simulate->add_option("--voters", voters_path, "Voter model (JSON)")->required();
  simulate->add_option("--iterations", iterations, "Activations to run")->required();
  simulate->add_option("--seed", seed, "Simulation seed")->required();
  simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--stopwords", stopwords, "Stopword list for word exports");

  fs::path log_path;
  auto* replay = app.add_subcommand("replay", "Replay an event log and print its digest");
  replay->add_option("--log", log_path, "Event log")->required();

  std::string what;
  std::optional<fs::path> out_path;
  long long bucket_seconds = 3600;
  std::string population = "final";
  auto* exp = app.add_subcommand("export", "Export analytics from an event log as CSV");
  exp->add_option("--log", log_path, "Event log")->required();
  exp->add_option("--what", what, "timeline, lengths or words")
      ->required()
      ->check(CLI::IsMember({"timeline", "lengths", "words"}));
  exp->add_option("--out", out_path, "Output file (default stdout)");
  exp->add_option("--bucket", bucket_seconds, "Timeline bucket in seconds")->capture_default_str()
      ->check(CLI::PositiveNumber);
  exp->add_option("--stopwords", stopwords, "Stopword list for word exports");
  exp->add_option("--population", population, "initial or final (words)")->capture_default_str()
      ->check(CLI::IsMember({"initial", "final"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, ticks, port);
    if (*simulate) {
      return cmd_simulate(config_path, voters_path, iterations, seed, out_dir, stopwords);
    }
    if (*replay) return cmd_replay(log_path);
    if (*exp) return cmd_export(log_path, what, out_path, bucket_seconds, stopwords, population);
  } catch (const CorruptLogError& e) {
    std::cerr << e.what() << "\n";
    return kExitCorrupt;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
