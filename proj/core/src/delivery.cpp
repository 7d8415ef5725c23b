#include "receptive/delivery.hpp"

#include "receptive/errors.hpp"

namespace receptive {

std::string to_string(ModelArm arm) {
  switch (arm) {
    case ModelArm::Control: return "control";
    case ModelArm::Static: return "static";
    case ModelArm::Adaptive: return "adaptive";
  }
  throw InternalError("unhandled model arm");
}

ModelArm arm_from_string(std::string_view s) {
  if (s == "control") return ModelArm::Control;
  if (s == "static") return ModelArm::Static;
  if (s == "adaptive") return ModelArm::Adaptive;
  throw DataError("unknown model arm: " + std::string(s));
}

ModelArm select_model(int day, Rng& rng, const DeliveryPolicy& policy) {
  if (day < 1) throw DataError("study day must be >= 1, got " + std::to_string(day));
  if (day <= policy.warm_up_days) {
    return rng.uniform_int(0, 1) == 0 ? ModelArm::Control : ModelArm::Static;
  }
  switch (rng.uniform_int(0, 2)) {
    case 0: return ModelArm::Control;
    case 1: return ModelArm::Static;
    default: return ModelArm::Adaptive;
  }
}

DeliveryRecord run_delivery(std::int64_t trigger_ts, ModelArm selected, const ContextFn& context_at,
                            const ReceptivityFn& receptive, const DeliveryPolicy& policy) {
  DeliveryRecord record;
  record.model_selected = selected;
  record.trigger_ts = trigger_ts;

  if (selected == ModelArm::Control) {
    record.model_attributed = ModelArm::Control;
    record.delivery_ts = trigger_ts;
    record.attempts = 1;
    record.context = context_at(trigger_ts);
    validate(record.context);
    return record;
  }

  for (int poll = 0; poll < policy.poll_count; ++poll) {
    const std::int64_t ts = trigger_ts + poll * policy.retry_interval;
    const ContextSnapshot ctx = context_at(ts);
    validate(ctx);
    if (receptive(ctx)) {
      record.model_attributed = selected;
      record.delivery_ts = ts;
      record.attempts = poll + 1;
      record.context = ctx;
      return record;
    }
  }

  // Every poll declined: force the prompt out. The moment was not chosen by
  // the model, so the delivery is charged to the control arm.
  record.model_attributed = ModelArm::Control;
  record.delivery_ts = trigger_ts + policy.fallback_offset;
  record.attempts = policy.poll_count;
  record.fallback = true;
  record.context = context_at(record.delivery_ts);
  validate(record.context);
  return record;
}

}  // namespace receptive
