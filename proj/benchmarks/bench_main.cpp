#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evoforge/engine.hpp"
#include "evoforge/operators/parse.hpp"
#include "evoforge/operators/template.hpp"
#include "evoforge/serialization.hpp"
#include "evoforge/sim/simulator.hpp"
#include "evoforge/sim/voter_model.hpp"
#include "evoforge/store/campaign_state.hpp"
#include "evoforge/store/event_log.hpp"

using namespace evoforge;

namespace {

std::filesystem::path source_dir() { return std::filesystem::path(EVOFORGE_SOURCE_DIR); }

std::vector<store::Event> sample_events(std::size_t iterations) {
  const auto config = load_config_file(source_dir() / "assets/examples/minimalist.json");
  sim::SimulationOptions options;
  options.iterations = iterations;
  options.seed = 1;
  return sim::simulate(config, sim::load_voter_model(source_dir() / "assets/examples/voters.json"),
                       options, store::EventLog::in_memory())
      .events;
}

std::string encoded(const std::vector<store::Event>& events) {
  std::string out;
  for (const auto& e : events) out += store::encode_record(e);
  return out;
}

void BM_TournamentSelect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<engine::Candidate> members;
  for (std::size_t i = 0; i < n; ++i) {
    members.push_back({ConceptId("c" + std::to_string(i)), static_cast<double>(i % 7) / 7.0,
                       i % 4, static_cast<std::int64_t>(i)});
  }
  Rng rng(42);
  for (auto _ : state) benchmark::DoNotOptimize(engine::tournament_select(members, rng, 2));
}
BENCHMARK(BM_TournamentSelect)->Arg(10)->Arg(100)->Arg(1000);

void BM_RemovalIndex(benchmark::State& state) {
  std::vector<engine::Candidate> members;
  for (std::size_t i = 0; i < 10; ++i) {
    members.push_back({ConceptId("c" + std::to_string(i)), (i % 3) - 1.0, i % 5,
                       static_cast<std::int64_t>(i)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(engine::removal_index(members, 3));
}
BENCHMARK(BM_RemovalIndex);

void BM_Replay(benchmark::State& state) {
  const auto events = sample_events(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(store::replay(events).digest());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_Replay)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_RecoverLog(benchmark::State& state) {
  const std::string bytes = encoded(sample_events(30));
  for (auto _ : state) benchmark::DoNotOptimize(store::recover_log(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_RecoverLog)->Unit(benchmark::kMillisecond);

void BM_ParseConcept(benchmark::State& state) {
  const auto schema =
      ops::load_template(source_dir() / "assets/templates/minimalist/init.txt").section_schema;
  std::ifstream in(source_dir() / "tests/fixtures/echoscape.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string raw = ss.str();
  for (auto _ : state) benchmark::DoNotOptimize(ops::parse_concept(raw, schema));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(raw.size()));
}
BENCHMARK(BM_ParseConcept);

}  // namespace
BENCHMARK_MAIN();
