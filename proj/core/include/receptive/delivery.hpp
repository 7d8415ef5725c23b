#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "receptive/features.hpp"
#include "receptive/rng.hpp"

namespace receptive {

// Which decision rule a prompt is routed through.
enum class ModelArm { Control, Static, Adaptive };

std::string to_string(ModelArm arm);
ModelArm arm_from_string(std::string_view s);

// Timing rules for a single prompt. All times are seconds.
struct DeliveryPolicy {
  int warm_up_days = 7;         // days 1..warm_up_days exclude the adaptive arm
  std::int64_t retry_interval = 300;   // gap between receptivity polls
  int poll_count = 7;                  // polls at offsets 0, 300, ..., 1800
  std::int64_t fallback_offset = 1860; // forced delivery when every poll declines
  std::int64_t jit_window = 600;       // just-in-time response window after delivery
};

// Outcome of routing one trigger through an arm.
struct DeliveryRecord {
  ModelArm model_selected = ModelArm::Control;   // arm the schedule picked
  ModelArm model_attributed = ModelArm::Control; // arm charged with the delivery
  std::int64_t trigger_ts = 0;
  std::int64_t delivery_ts = 0;
  int attempts = 0;            // polls consumed, 1..poll_count
  bool fallback = false;       // true when no poll accepted and the prompt was forced out
  ContextSnapshot context;     // phone context at the moment of delivery
};

// Picks the arm for a trigger on the given study day (1-based). During warm-up
// only the control and static arms are eligible, with equal probability; from
// the first post-warm-up day all three arms are equally likely.
ModelArm select_model(int day, Rng& rng, const DeliveryPolicy& policy = {});

using ContextFn = std::function<ContextSnapshot(std::int64_t ts)>;
using ReceptivityFn = std::function<bool(const ContextSnapshot&)>;

// Runs the delivery loop for one trigger. The control arm sends immediately.
// The static and adaptive arms poll the context at retry_interval steps and
// send at the first poll their model accepts; if every poll declines, the
// prompt is forced out at trigger_ts + fallback_offset and attributed to the
// control arm (the model never chose that moment).
DeliveryRecord run_delivery(std::int64_t trigger_ts, ModelArm selected, const ContextFn& context_at,
                            const ReceptivityFn& receptive, const DeliveryPolicy& policy = {});

}  // namespace receptive
