#include "receptive/labeling.hpp"

#include <algorithm>

#include "receptive/errors.hpp"

namespace receptive {

void validate(const OutcomeRecord& outcome) {
  if (!outcome.first_response_ts.has_value()) {
    if (!outcome.reply_ts.empty()) {
      throw DataError("outcome has replies but no first response time");
    }
    if (outcome.context_at_response.has_value()) {
      throw DataError("outcome has a response context but no response");
    }
    return;
  }
  if (*outcome.first_response_ts < outcome.delivery_ts) {
    throw DataError("response at " + std::to_string(*outcome.first_response_ts) +
                    " precedes delivery at " + std::to_string(outcome.delivery_ts));
  }
  if (outcome.reply_ts.empty() ||
      *std::min_element(outcome.reply_ts.begin(), outcome.reply_ts.end()) !=
          *outcome.first_response_ts) {
    throw DataError("first response time must equal the earliest reply");
  }
  if (!outcome.context_at_response.has_value()) {
    throw DataError("responded outcome is missing its response context");
  }
  validate(*outcome.context_at_response);
}

LabeledInstance to_instance(const LabeledContext& lc) { return {encode(lc.context), lc.label}; }

std::vector<LabeledContext> label_outcome(const DeliveryRecord& delivery,
                                          const OutcomeRecord& outcome,
                                          std::int64_t jit_window) {
  validate(outcome);
  if (outcome.delivery_ts != delivery.delivery_ts) {
    throw DataError("outcome and delivery disagree on the delivery time");
  }

  std::vector<LabeledContext> out;
  if (!outcome.first_response_ts.has_value()) {
    out.push_back({delivery.delivery_ts, delivery.context, 0});
    return out;
  }

  const std::int64_t delay = *outcome.first_response_ts - delivery.delivery_ts;
  if (delay <= jit_window) {
    out.push_back({delivery.delivery_ts, delivery.context, 1});
    return out;
  }

  // Late response: the prompt sat unanswered, so the delivery moment gets a
  // negative label while the moment the participant actually engaged gets a
  // positive one.
  out.push_back({delivery.delivery_ts, delivery.context, 0});
  out.push_back({*outcome.first_response_ts, *outcome.context_at_response, 1});
  return out;
}

}  // namespace receptive
