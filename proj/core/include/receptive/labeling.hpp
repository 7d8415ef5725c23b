#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "receptive/delivery.hpp"
#include "receptive/features.hpp"
#include "receptive/models.hpp"

namespace receptive {

// What the participant did with one delivered prompt.
struct OutcomeRecord {
  std::int64_t delivery_ts = 0;
  std::optional<std::int64_t> first_response_ts;  // absent when the prompt was ignored
  std::vector<std::int64_t> reply_ts;             // every reply, first response included
  std::optional<ContextSnapshot> context_at_response;  // present iff a response exists
};

// Throws DataError when the record breaks its own rules (response before
// delivery, first response not the earliest reply, response context missing).
void validate(const OutcomeRecord& outcome);

// A phone context labeled with whether the participant was receptive in it.
struct LabeledContext {
  std::int64_t ts = 0;
  ContextSnapshot context;
  int label = 0;  // 1 = receptive, 0 = not receptive
};

LabeledInstance to_instance(const LabeledContext& lc);

// Turns one delivered prompt and its outcome into labeled contexts:
//  - response within the just-in-time window: the delivery context was a good
//    moment -> one receptive label at delivery;
//  - late response: non-receptive at delivery, receptive at the moment the
//    participant finally answered;
//  - no response: one non-receptive label at delivery.
std::vector<LabeledContext> label_outcome(const DeliveryRecord& delivery,
                                          const OutcomeRecord& outcome,
                                          std::int64_t jit_window = 600);

}  // namespace receptive
