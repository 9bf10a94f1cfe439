#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <istream>
#include <ostream>
#include <vector>

#include "evoforge/domain.hpp"
#include "evoforge/feedback/campaign.hpp"
#include "evoforge/feedback/clock.hpp"

namespace evoforge::api {

struct RegistryOptions {
  /// One "<campaign id>.log" per campaign. Empty keeps logs in memory.
  std::filesystem::path log_dir;
  bool durable = true;
  /// Sink for console channels; defaults to std::cout.
  std::ostream* console = nullptr;
  /// Source of typed console votes; none by default.
  std::istream* console_input = nullptr;
};

/// Campaign ids double as log file names.
bool valid_campaign_id(std::string_view id);

/// The campaigns a service process hosts, each with its own backend,
/// operator suite and channel.
class CampaignRegistry {
 public:
  CampaignRegistry(RegistryOptions options, const feedback::Clock& clock);
  ~CampaignRegistry();
  CampaignRegistry(const CampaignRegistry&) = delete;
  CampaignRegistry& operator=(const CampaignRegistry&) = delete;

  /// Resumes every log in log_dir; returns how many were loaded.
  std::size_t resume_all();
  /// Opens (or resumes, if its log already exists) the campaign `id`.
  feedback::Campaign& open(const CampaignId& id, const CampaignConfig& config);
  /// Error(kInvalidArgument) for a malformed id, Error(kInvalidTransition)
  /// when the id is taken.
  feedback::Campaign& create(const CampaignId& id, const CampaignConfig& config);

  feedback::Campaign* find(const CampaignId& id) const;
  /// Campaign holding `concept_id`, if any.
  feedback::Campaign* owner_of(const ConceptId& concept_id) const;
  std::vector<CampaignId> ids() const;
  /// First unused id of the form "campaign-N".
  CampaignId next_id() const;

  /// Runs Campaign::tick on every running campaign; failures are reported
  /// through `errors` and do not stop the others.
  void tick_all(std::ostream* errors = nullptr);

 private:
  struct Entry;
  std::unique_ptr<Entry> build(const CampaignConfig& config);
  std::filesystem::path log_path(const CampaignId& id) const;

  RegistryOptions options_;
  const feedback::Clock& clock_;
  mutable std::mutex mutex_;
  std::map<CampaignId, std::unique_ptr<Entry>> entries_;
};

}  // namespace evoforge::api
