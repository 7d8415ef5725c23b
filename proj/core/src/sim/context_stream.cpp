#include "receptive/sim/context_stream.hpp"

#include <algorithm>
#include <cmath>

#include "receptive/errors.hpp"
#include "receptive/rng.hpp"

namespace receptive::sim {

namespace {

constexpr int kMinutesPerDay = 1440;
constexpr int kNightEnd = 390;        // 06:30 — sleep ends: phone activity resumes
constexpr int kChargeEnd = 360;       // 06:00 — off the overnight charger
constexpr int kAwayWindowStart = 450; // 07:30 — earliest departure
constexpr int kForcedHome = 1290;     // 21:30 — everyone is home for the night

// Exponential dwell in whole minutes, at least 1.
int draw_dwell(Rng& rng, double mean_minutes) {
  const double u = rng.uniform();
  const double dwell = -mean_minutes * std::log1p(-u);
  return std::max(1, static_cast<int>(std::llround(dwell)));
}

Activity draw_activity(Rng& rng, bool away) {
  const double u = rng.uniform();
  if (away) {
    if (u < 0.35) return Activity::Still;
    if (u < 0.60) return Activity::OnFoot;
    if (u < 0.80) return Activity::InVehicle;
    if (u < 0.90) return Activity::OnBike;
    return Activity::Running;
  }
  if (u < 0.70) return Activity::Still;
  if (u < 0.90) return Activity::OnFoot;
  if (u < 0.93) return Activity::OnBike;
  if (u < 0.97) return Activity::Running;
  return Activity::InVehicle;
}

double dwell_mean_minutes(Activity a) {
  switch (a) {
    case Activity::Still: return 45.0;
    case Activity::OnFoot: return 12.0;
    case Activity::OnBike: return 15.0;
    case Activity::Running: return 12.0;
    case Activity::InVehicle: return 25.0;
  }
  throw InternalError("unhandled activity");
}

}  // namespace

ContextStream::ContextStream(ParticipantProfile profile, std::uint64_t seed)
    : profile_(std::move(profile)), seed_(seed) {}

int ContextStream::day_of_ts(std::int64_t ts) {
  if (ts < 0) throw DataError("negative study timestamp");
  return static_cast<int>(ts / 86400) + 1;
}

int ContextStream::minute_of_day(std::int64_t ts) {
  if (ts < 0) throw DataError("negative study timestamp");
  return static_cast<int>((ts % 86400) / 60);
}

bool ContextStream::is_weekend(int day) {
  const int weekday = (day - 1) % 7;  // day 1 is a Monday
  return weekday == 5 || weekday == 6;
}

ContextSnapshot ContextStream::at(std::int64_t ts) const {
  const int day = day_of_ts(ts);
  const auto& grid = day_grid(day);
  return grid[static_cast<std::size_t>(minute_of_day(ts))];
}

ContextFn ContextStream::as_fn() const {
  return [this](std::int64_t ts) { return at(ts); };
}

const std::vector<ContextSnapshot>& ContextStream::day_grid(int day) const {
  auto it = cache_.find(day);
  if (it == cache_.end()) it = cache_.emplace(day, build_day(day)).first;
  return it->second;
}

std::vector<ContextSnapshot> ContextStream::build_day(int day) const {
  const bool weekend = is_weekend(day);
  const auto& regime = profile_.regime;

  // Location layer: home overnight, optional away spells through the day.
  std::vector<bool> home(kMinutesPerDay, true);
  {
    Rng rng(Rng::derive(seed_, {static_cast<std::uint64_t>(day), 1}));
    if (rng.bernoulli(regime.away_prob)) {
      int m = static_cast<int>(rng.uniform_int(kAwayWindowStart, 570));
      bool away = true;
      while (m < kForcedHome) {
        const int dwell =
            draw_dwell(rng, away ? regime.mean_away_minutes : regime.mean_home_minutes);
        const int end = std::min(m + dwell, kForcedHome);
        if (away) std::fill(home.begin() + m, home.begin() + end, false);
        m = end;
        away = !away;
      }
    }
  }

  // Lock layer: asleep means locked; the day alternates locked/unlocked spells.
  std::vector<bool> unlocked(kMinutesPerDay, false);
  std::vector<bool> lock_flip(kMinutesPerDay, false);
  std::int64_t initial_lock_age = 0;
  {
    Rng rng(Rng::derive(seed_, {static_cast<std::uint64_t>(day), 2}));
    initial_lock_age = rng.uniform_int(0, 21600);
    int m = kNightEnd;
    bool is_unlocked = false;
    while (m < kMinutesPerDay) {
      const int dwell = draw_dwell(
          rng, is_unlocked ? regime.mean_unlocked_minutes : regime.mean_locked_minutes);
      const int end = std::min(m + dwell, kMinutesPerDay);
      if (is_unlocked) std::fill(unlocked.begin() + m, unlocked.begin() + end, true);
      m = end;
      is_unlocked = !is_unlocked;
      if (m < kMinutesPerDay) lock_flip[static_cast<std::size_t>(m)] = true;
    }
  }

  // Activity layer: still overnight, then regime-driven semi-Markov moves.
  std::vector<Activity> activity(kMinutesPerDay, Activity::Still);
  {
    Rng rng(Rng::derive(seed_, {static_cast<std::uint64_t>(day), 3}));
    int m = kNightEnd;
    Activity state = Activity::Still;
    while (m < kMinutesPerDay) {
      const int dwell = draw_dwell(rng, dwell_mean_minutes(state));
      const int end = std::min(m + dwell, kMinutesPerDay);
      std::fill(activity.begin() + m, activity.begin() + end, state);
      m = end;
      if (m < kMinutesPerDay) state = draw_activity(rng, !home[static_cast<std::size_t>(m)]);
    }
  }

  // Battery layer: off the charger at 06:00, steady discharge, maybe an
  // evening plug-in.
  double discharge_per_hour = 0.8;
  int plug_minute = kMinutesPerDay;  // past end-of-day = never
  {
    Rng rng(Rng::derive(seed_, {static_cast<std::uint64_t>(day), 4}));
    discharge_per_hour = rng.uniform(0.6, 1.0);
    if (rng.bernoulli(regime.evening_plug_prob)) {
      plug_minute = static_cast<int>(rng.uniform_int(1260, 1380));
    }
  }

  std::vector<ContextSnapshot> grid(kMinutesPerDay);
  int last_flip = -1;
  const double level_at_plug =
      100.0 - discharge_per_hour * static_cast<double>(plug_minute - kChargeEnd) / 60.0;
  for (int m = 0; m < kMinutesPerDay; ++m) {
    ContextSnapshot& snap = grid[static_cast<std::size_t>(m)];
    snap.day_type = weekend ? DayType::Weekend : DayType::Weekday;
    snap.time_of_day = time_of_day_from_clock(m);

    double level = 100.0;
    if (m < kChargeEnd) {
      snap.battery_status = BatteryStatus::Full;
    } else if (m < plug_minute) {
      level = 100.0 - discharge_per_hour * static_cast<double>(m - kChargeEnd) / 60.0;
      snap.battery_status = BatteryStatus::Discharging;
    } else {
      level = level_at_plug + 25.0 * static_cast<double>(m - plug_minute) / 60.0;
      snap.battery_status = level >= 100.0 ? BatteryStatus::Full : BatteryStatus::Charging;
    }
    snap.battery_level =
        std::clamp(static_cast<int>(std::llround(level)), 1, 100);

    if (lock_flip[static_cast<std::size_t>(m)]) last_flip = m;
    snap.lock_state =
        unlocked[static_cast<std::size_t>(m)] ? LockState::Unlocked : LockState::Locked;
    snap.lock_change_time = last_flip < 0
                                ? initial_lock_age + static_cast<std::int64_t>(m) * 60
                                : static_cast<std::int64_t>(m - last_flip) * 60;

    snap.wifi = home[static_cast<std::size_t>(m)] ? WifiState::Connected : WifiState::Disconnected;
    snap.activity = activity[static_cast<std::size_t>(m)];
    validate(snap);
  }
  return grid;
}

}  // namespace receptive::sim
