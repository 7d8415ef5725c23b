#pragma once

#include <cstdint>

#include "receptive/labeling.hpp"
#include "receptive/rng.hpp"
#include "receptive/sim/context_stream.hpp"
#include "receptive/sim/population.hpp"

namespace receptive::sim {

// Rolls one participant's reaction to a delivered prompt. An immediate
// response happens with the true receptivity probability of the delivery
// context (habituation included); otherwise the participant may answer late —
// after the just-in-time window, at a moment pulled from their context stream
// — or not at all.
OutcomeRecord simulate_response(const ParticipantProfile& profile,
                                const ContextSnapshot& context_at_delivery, int day,
                                std::int64_t delivery_ts, const ContextStream& stream, Rng& rng,
                                std::int64_t jit_window = 600);

}  // namespace receptive::sim
