#include "receptive/features.hpp"

#include <algorithm>
#include <cmath>

#include "receptive/errors.hpp"

namespace receptive {

bool is_valid(const ContextSnapshot& s) {
  return s.battery_level >= 1 && s.battery_level <= 100 && s.lock_change_time >= 0;
}

void validate(const ContextSnapshot& s) {
  if (s.battery_level < 1 || s.battery_level > 100) {
    throw DataError("battery_level out of range [1,100]: " + std::to_string(s.battery_level));
  }
  if (s.lock_change_time < 0) {
    throw DataError("lock_change_time negative: " + std::to_string(s.lock_change_time));
  }
}

FeatureVector encode(const ContextSnapshot& s) {
  FeatureVector v(kFeatureCount, 0.0);
  using namespace feature_index;
  v[kWeekend] = s.day_type == DayType::Weekend ? 1.0 : 0.0;
  switch (s.time_of_day) {
    case TimeOfDay::Morning: v[kMorning] = 1.0; break;
    case TimeOfDay::Afternoon: v[kAfternoon] = 1.0; break;
    case TimeOfDay::Evening: v[kEvening] = 1.0; break;
  }
  switch (s.battery_status) {
    case BatteryStatus::Charging: v[kCharging] = 1.0; break;
    case BatteryStatus::Discharging: v[kDischarging] = 1.0; break;
    case BatteryStatus::Full: v[kFull] = 1.0; break;
  }
  v[kBatteryLevel] = static_cast<double>(s.battery_level) / 100.0;
  v[kUnlocked] = s.lock_state == LockState::Unlocked ? 1.0 : 0.0;
  // Seconds since last lock transition, log-compressed and capped at one day
  // so the component stays in [0, 1].
  static const double kLogDay = std::log1p(86400.0);
  v[kLockChange] = std::min(std::log1p(static_cast<double>(s.lock_change_time)) / kLogDay, 1.0);
  v[kWifiConnected] = s.wifi == WifiState::Connected ? 1.0 : 0.0;
  switch (s.activity) {
    case Activity::Still: v[kStill] = 1.0; break;
    case Activity::OnFoot: v[kOnFoot] = 1.0; break;
    case Activity::OnBike: v[kOnBike] = 1.0; break;
    case Activity::Running: v[kRunning] = 1.0; break;
    case Activity::InVehicle: v[kInVehicle] = 1.0; break;
  }
  return v;
}

TimeOfDay time_of_day_from_clock(int minutes_since_midnight) {
  if (minutes_since_midnight < 0 || minutes_since_midnight > 1439) {
    throw DataError("minutes_since_midnight out of range [0,1439]: " +
                    std::to_string(minutes_since_midnight));
  }
  if (minutes_since_midnight >= 300 && minutes_since_midnight < 720) return TimeOfDay::Morning;
  if (minutes_since_midnight >= 720 && minutes_since_midnight < 1080) return TimeOfDay::Afternoon;
  return TimeOfDay::Evening;
}

std::string_view to_string(DayType v) {
  return v == DayType::Weekday ? "weekday" : "weekend";
}

std::string_view to_string(TimeOfDay v) {
  switch (v) {
    case TimeOfDay::Morning: return "morning";
    case TimeOfDay::Afternoon: return "afternoon";
    default: return "evening";
  }
}

std::string_view to_string(BatteryStatus v) {
  switch (v) {
    case BatteryStatus::Charging: return "charging";
    case BatteryStatus::Discharging: return "discharging";
    default: return "full";
  }
}

std::string_view to_string(LockState v) {
  return v == LockState::Locked ? "locked" : "unlocked";
}

std::string_view to_string(WifiState v) {
  return v == WifiState::Connected ? "connected" : "disconnected";
}

std::string_view to_string(Activity v) {
  switch (v) {
    case Activity::Still: return "still";
    case Activity::OnFoot: return "on_foot";
    case Activity::OnBike: return "on_bike";
    case Activity::Running: return "running";
    default: return "in_vehicle";
  }
}

namespace {
[[noreturn]] void unknown(std::string_view field, std::string_view s) {
  throw DataError("unknown " + std::string(field) + " value: '" + std::string(s) + "'");
}
}  // namespace

DayType day_type_from_string(std::string_view s) {
  if (s == "weekday") return DayType::Weekday;
  if (s == "weekend") return DayType::Weekend;
  unknown("day_type", s);
}

TimeOfDay time_of_day_from_string(std::string_view s) {
  if (s == "morning") return TimeOfDay::Morning;
  if (s == "afternoon") return TimeOfDay::Afternoon;
  if (s == "evening") return TimeOfDay::Evening;
  unknown("time_of_day", s);
}

BatteryStatus battery_status_from_string(std::string_view s) {
  if (s == "charging") return BatteryStatus::Charging;
  if (s == "discharging") return BatteryStatus::Discharging;
  if (s == "full") return BatteryStatus::Full;
  unknown("battery_status", s);
}

LockState lock_state_from_string(std::string_view s) {
  if (s == "locked") return LockState::Locked;
  if (s == "unlocked") return LockState::Unlocked;
  unknown("lock_state", s);
}

WifiState wifi_from_string(std::string_view s) {
  if (s == "connected") return WifiState::Connected;
  if (s == "disconnected") return WifiState::Disconnected;
  unknown("wifi", s);
}

Activity activity_from_string(std::string_view s) {
  if (s == "still") return Activity::Still;
  if (s == "on_foot") return Activity::OnFoot;
  if (s == "on_bike") return Activity::OnBike;
  if (s == "running") return Activity::Running;
  if (s == "in_vehicle") return Activity::InVehicle;
  unknown("activity", s);
}

}  // namespace receptive
