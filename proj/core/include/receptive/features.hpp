#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace receptive {

enum class DayType { Weekday, Weekend };
enum class TimeOfDay { Morning, Afternoon, Evening };
enum class BatteryStatus { Charging, Discharging, Full };
enum class LockState { Locked, Unlocked };
enum class WifiState { Connected, Disconnected };
enum class Activity { Still, OnFoot, OnBike, Running, InVehicle };

// One participant-moment of phone context. battery_level is a percent in
// [1, 100]; lock_change_time is seconds since the last lock-state transition.
struct ContextSnapshot {
  DayType day_type = DayType::Weekday;
  TimeOfDay time_of_day = TimeOfDay::Morning;
  BatteryStatus battery_status = BatteryStatus::Discharging;
  int battery_level = 100;
  LockState lock_state = LockState::Locked;
  std::int64_t lock_change_time = 0;
  WifiState wifi = WifiState::Connected;
  Activity activity = Activity::Still;
};

bool is_valid(const ContextSnapshot& snapshot);
// Throws DataError when a field is out of range; the trust boundary for
// snapshots built from external data.
void validate(const ContextSnapshot& snapshot);

// Fixed encoded width shared by every model in the system.
inline constexpr std::size_t kFeatureCount = 16;

using FeatureVector = std::vector<double>;

// Encoded layout. The simulator's ground-truth weights index into this.
namespace feature_index {
inline constexpr std::size_t kWeekend = 0;
inline constexpr std::size_t kMorning = 1;
inline constexpr std::size_t kAfternoon = 2;
inline constexpr std::size_t kEvening = 3;
inline constexpr std::size_t kCharging = 4;
inline constexpr std::size_t kDischarging = 5;
inline constexpr std::size_t kFull = 6;
inline constexpr std::size_t kBatteryLevel = 7;
inline constexpr std::size_t kUnlocked = 8;
inline constexpr std::size_t kLockChange = 9;
inline constexpr std::size_t kWifiConnected = 10;
inline constexpr std::size_t kStill = 11;
inline constexpr std::size_t kOnFoot = 12;
inline constexpr std::size_t kOnBike = 13;
inline constexpr std::size_t kRunning = 14;
inline constexpr std::size_t kInVehicle = 15;
}  // namespace feature_index

// Deterministic 16-component encoding:
//   [weekend] [time-of-day one-hot x3] [battery-status one-hot x3]
//   [battery_level/100] [unlocked] [log1p(lock_change)/log1p(86400), capped]
//   [wifi connected] [activity one-hot x5]
// Every component lies in [0, 1].
FeatureVector encode(const ContextSnapshot& snapshot);

// 05:00-11:59 morning, 12:00-17:59 afternoon, the rest evening.
// Input is minutes since midnight, 0-1439; out of range throws DataError.
TimeOfDay time_of_day_from_clock(int minutes_since_midnight);

std::string_view to_string(DayType v);
std::string_view to_string(TimeOfDay v);
std::string_view to_string(BatteryStatus v);
std::string_view to_string(LockState v);
std::string_view to_string(WifiState v);
std::string_view to_string(Activity v);

// Parsers throw DataError on unknown names.
DayType day_type_from_string(std::string_view s);
TimeOfDay time_of_day_from_string(std::string_view s);
BatteryStatus battery_status_from_string(std::string_view s);
LockState lock_state_from_string(std::string_view s);
WifiState wifi_from_string(std::string_view s);
Activity activity_from_string(std::string_view s);

}  // namespace receptive
