#include "evoforge/api/registry.hpp"

#include <iostream>

#include "evoforge/errors.hpp"
#include "evoforge/factory.hpp"
#include "evoforge/operators/suite.hpp"
#include "evoforge/store/campaign_state.hpp"

namespace evoforge::api {

struct CampaignRegistry::Entry {
  std::unique_ptr<ops::CompletionBackend> backend;
  std::unique_ptr<ops::OperatorSuite> suite;
  std::unique_ptr<feedback::ChannelAdapter> channel;
  std::unique_ptr<feedback::Campaign> campaign;
};

bool valid_campaign_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

CampaignRegistry::CampaignRegistry(RegistryOptions options, const feedback::Clock& clock)
    : options_(std::move(options)), clock_(clock) {
  if (!options_.log_dir.empty()) std::filesystem::create_directories(options_.log_dir);
}

CampaignRegistry::~CampaignRegistry() = default;

std::filesystem::path CampaignRegistry::log_path(const CampaignId& id) const {
  return options_.log_dir / (id.str() + ".log");
}

std::unique_ptr<CampaignRegistry::Entry> CampaignRegistry::build(const CampaignConfig& config) {
  auto entry = std::make_unique<Entry>();
  entry->backend = make_backend(config.backend);
  entry->suite = std::make_unique<ops::OperatorSuite>(load_campaign_templates(config),
                                                      *entry->backend,
                                                      ops::generation_settings(config));
  entry->channel =
      make_channel(config.channel, options_.console ? *options_.console : std::cout,
                   options_.console_input);
  return entry;
}

std::size_t CampaignRegistry::resume_all() {
  if (options_.log_dir.empty()) return 0;
  std::size_t loaded = 0;
  for (const auto& file : std::filesystem::directory_iterator(options_.log_dir)) {
    if (file.path().extension() != ".log") continue;
    const CampaignId id(file.path().stem().string());
    {
      std::lock_guard lock(mutex_);
      if (entries_.count(id) > 0) continue;
    }
    store::EventLog log = store::EventLog::open_file(file.path(), options_.durable);
    const CampaignConfig config = store::replay(log.events()).config();
    auto entry = build(config);
    entry->campaign =
        feedback::Campaign::resume(std::move(log), *entry->suite, *entry->channel, clock_);
    std::lock_guard lock(mutex_);
    entries_.emplace(id, std::move(entry));
    ++loaded;
  }
  return loaded;
}

feedback::Campaign& CampaignRegistry::open(const CampaignId& id, const CampaignConfig& config) {
  if (!valid_campaign_id(id.str())) {
    throw Error(ErrorCode::kInvalidArgument, "campaign id '" + id.str() + "' is not allowed");
  }
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(id); it != entries_.end()) return *it->second->campaign;
  }
  store::EventLog log = options_.log_dir.empty()
                            ? store::EventLog::in_memory()
                            : store::EventLog::open_file(log_path(id), options_.durable);
  auto entry = build(config);
  if (log.last_seq() > 0) {
    entry->campaign =
        feedback::Campaign::resume(std::move(log), *entry->suite, *entry->channel, clock_);
  } else {
    entry->campaign = feedback::Campaign::create(id, config, std::move(log), *entry->suite,
                                                 *entry->channel, clock_);
  }
  std::lock_guard lock(mutex_);
  auto& slot = entries_[id];
  if (!slot) slot = std::move(entry);
  return *slot->campaign;
}

feedback::Campaign& CampaignRegistry::create(const CampaignId& id, const CampaignConfig& config) {
  if (!valid_campaign_id(id.str())) {
    throw Error(ErrorCode::kInvalidArgument, "campaign id '" + id.str() + "' is not allowed");
  }
  {
    std::lock_guard lock(mutex_);
    if (entries_.count(id) > 0) {
      throw Error(ErrorCode::kInvalidTransition, "campaign " + id.str() + " already exists");
    }
  }
  if (!options_.log_dir.empty() && std::filesystem::exists(log_path(id)) &&
      std::filesystem::file_size(log_path(id)) > 0) {
    throw Error(ErrorCode::kInvalidTransition, "campaign " + id.str() + " already exists");
  }
  return open(id, config);
}

feedback::Campaign* CampaignRegistry::find(const CampaignId& id) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : it->second->campaign.get();
}

feedback::Campaign* CampaignRegistry::owner_of(const ConceptId& concept_id) const {
  std::lock_guard lock(mutex_);
  for (const auto& [id, entry] : entries_) {
    const bool has = entry->campaign->read(
        [&](const store::CampaignState& s) { return s.find(concept_id) != nullptr; });
    if (has) return entry->campaign.get();
  }
  return nullptr;
}

std::vector<CampaignId> CampaignRegistry::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<CampaignId> out;
  for (const auto& [id, entry] : entries_) out.push_back(id);
  return out;
}

CampaignId CampaignRegistry::next_id() const {
  std::lock_guard lock(mutex_);
  for (std::size_t n = 1;; ++n) {
    CampaignId id("campaign-" + std::to_string(n));
    const bool on_disk = !options_.log_dir.empty() && std::filesystem::exists(log_path(id));
    if (entries_.count(id) == 0 && !on_disk) return id;
  }
}

void CampaignRegistry::tick_all(std::ostream* errors) {
  std::vector<feedback::Campaign*> campaigns;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, entry] : entries_) campaigns.push_back(entry->campaign.get());
  }
  for (feedback::Campaign* c : campaigns) {
    const bool running = c->read(
        [](const store::CampaignState& s) { return s.lifecycle() == store::Lifecycle::kRunning; });
    if (!running) continue;
    try {
      c->tick();
    } catch (const std::exception& e) {
      if (errors) *errors << "campaign " << c->id().str() << ": " << e.what() << "\n";
    }
  }
}

}  // namespace evoforge::api
