#include "evoforge/feedback/schedule.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include "evoforge/errors.hpp"

namespace evoforge::feedback {

namespace {

absl::TimeZone load_zone(const std::string& name) {
  absl::TimeZone tz;
  if (!absl::LoadTimeZone(name, &tz)) {
    throw Error(ErrorCode::kInvalidConfig, "channel.timezone: unknown time zone '" + name + "'");
  }
  return tz;
}

}  // namespace

PublishSchedule::PublishSchedule(std::vector<TimeOfDay> slots, const std::string& timezone,
                                 bool immediate_mode)
    : slots_(std::move(slots)), timezone_(timezone), immediate_(immediate_mode) {
  load_zone(timezone_);
  for (std::size_t i = 1; i < slots_.size(); ++i) {
    if (!(slots_[i - 1] < slots_[i])) {
      throw Error(ErrorCode::kInvalidConfig, "publish_slots must be strictly increasing");
    }
  }
  if (slots_.empty() && !immediate_) {
    throw Error(ErrorCode::kInvalidConfig, "publish_slots is empty and immediate_mode is off");
  }
}

PublishSchedule PublishSchedule::from_config(const CampaignConfig& config) {
  return PublishSchedule(config.publish_slots, config.channel.timezone,
                         config.channel.immediate_mode);
}

Timestamp PublishSchedule::next_slot(Timestamp t) const {
  if (immediate_) return t;
  const absl::TimeZone tz = load_zone(timezone_);
  const absl::Time at = absl::FromUnixSeconds(t.time_since_epoch().count());
  const absl::CivilDay today(absl::ToCivilDay(at, tz));
  for (int offset = 0; offset < 3; ++offset) {
    const absl::CivilDay day = today + offset;
    for (const TimeOfDay& slot : slots_) {
      const absl::CivilMinute civil(day.year(), day.month(), day.day(), slot.hour, slot.minute);
      const absl::Time candidate = absl::FromCivil(civil, tz);
      if (candidate >= at) return Timestamp(std::chrono::seconds(absl::ToUnixSeconds(candidate)));
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "no publication slot within two days");
}

}  // namespace evoforge::feedback
