#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "receptive/rng.hpp"

namespace receptive {

// The three kinds of initiating prompts sent over a study day.
enum class TriggerKind { GoalSetting, SelfMonitoring, GoalAchievement };

std::string to_string(TriggerKind kind);
TriggerKind trigger_kind_from_string(std::string_view s);

struct Trigger {
  TriggerKind kind = TriggerKind::GoalSetting;
  int minute = 0;  // minutes since midnight
};

// One participant-day's prompt schedule, sorted by time of day.
struct DayPlan {
  std::vector<Trigger> triggers;
};

// Builds a day's schedule: a goal-setting prompt at a uniform minute in the
// morning block [08:00, 10:00), a self-monitoring prompt on half the days at a
// uniform minute in [10:00, 18:00), and a goal-achievement prompt fixed at
// 21:00. Expected prompts/day = 2.5. `self_monitoring` overrides the coin when
// the caller assigns the daytime prompt cohort externally.
DayPlan plan_day(Rng& rng, std::optional<bool> self_monitoring = std::nullopt);

// Daily step goal: the nearest-rank 60th percentile of the last up-to-9 daily
// step counts (sorted ascending, element at 1-based index ceil(0.6 * n)).
std::int64_t step_goal(const std::vector<std::int64_t>& previous_steps);

}  // namespace receptive
