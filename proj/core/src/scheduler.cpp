#include "receptive/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "receptive/errors.hpp"

namespace receptive {

std::string to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::GoalSetting: return "goal_setting";
    case TriggerKind::SelfMonitoring: return "self_monitoring";
    case TriggerKind::GoalAchievement: return "goal_achievement";
  }
  throw InternalError("unhandled trigger kind");
}

TriggerKind trigger_kind_from_string(std::string_view s) {
  if (s == "goal_setting") return TriggerKind::GoalSetting;
  if (s == "self_monitoring") return TriggerKind::SelfMonitoring;
  if (s == "goal_achievement") return TriggerKind::GoalAchievement;
  throw DataError("unknown trigger kind: " + std::string(s));
}

DayPlan plan_day(Rng& rng, std::optional<bool> self_monitoring) {
  DayPlan plan;
  plan.triggers.push_back(
      {TriggerKind::GoalSetting, static_cast<int>(rng.uniform_int(480, 599))});
  const bool monitor = self_monitoring.value_or(rng.bernoulli(0.5));
  if (monitor) {
    plan.triggers.push_back(
        {TriggerKind::SelfMonitoring, static_cast<int>(rng.uniform_int(600, 1079))});
  }
  plan.triggers.push_back({TriggerKind::GoalAchievement, 1260});
  return plan;  // block bounds keep the kinds already time-ordered
}

std::int64_t step_goal(const std::vector<std::int64_t>& previous_steps) {
  if (previous_steps.empty()) throw DataError("step goal needs at least one day of history");
  if (previous_steps.size() > 9) {
    throw DataError("step goal history is capped at 9 days, got " +
                    std::to_string(previous_steps.size()));
  }
  for (std::int64_t s : previous_steps) {
    if (s < 0) throw DataError("negative daily step count");
  }
  std::vector<std::int64_t> sorted = previous_steps;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(0.6 * n));  // 1-based nearest rank
  return sorted[rank - 1];
}

}  // namespace receptive
