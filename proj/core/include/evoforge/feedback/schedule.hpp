#pragma once

#include <string>
#include <vector>

#include "evoforge/domain.hpp"

namespace evoforge::feedback {

/// Daily publication slots in a named time zone.
class PublishSchedule {
 public:
  /// Throws Error(kInvalidConfig) for an unknown zone or unordered slots.
  PublishSchedule(std::vector<TimeOfDay> slots, const std::string& timezone,
                  bool immediate_mode);

  static PublishSchedule from_config(const CampaignConfig& config);

  /// Earliest slot instant at or after `t`; `t` itself in immediate mode.
  Timestamp next_slot(Timestamp t) const;

  bool immediate() const noexcept { return immediate_; }
  const std::vector<TimeOfDay>& slots() const noexcept { return slots_; }
  const std::string& timezone() const noexcept { return timezone_; }

 private:
  std::vector<TimeOfDay> slots_;
  std::string timezone_;
  bool immediate_;
};

}  // namespace evoforge::feedback
