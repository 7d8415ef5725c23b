#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "receptive/delivery.hpp"
#include "receptive/features.hpp"
#include "receptive/sim/population.hpp"

namespace receptive::sim {

// Minute-resolution piecewise-constant context for one participant. Each study
// day is an independently seeded grid of 1440 snapshots built on first touch:
// a home/away layer driving Wi-Fi, semi-Markov activity and lock layers with
// regime-specific dwell times, and a battery that discharges through the day
// and recharges at night. Day 1 is a Monday.
//
// Not safe for concurrent use: the per-day cache mutates on first access. Each
// worker owns its streams.
class ContextStream {
 public:
  ContextStream(ParticipantProfile profile, std::uint64_t seed);

  // Snapshot at an absolute study second (>= 0; day d spans
  // [(d-1)*86400, d*86400)). Identical calls return identical snapshots.
  ContextSnapshot at(std::int64_t ts) const;

  // Adapter for the delivery loop.
  ContextFn as_fn() const;

  static int day_of_ts(std::int64_t ts);     // 1-based study day
  static int minute_of_day(std::int64_t ts);  // 0..1439
  static bool is_weekend(int day);            // day 6, 7, 13, 14, ...

 private:
  const std::vector<ContextSnapshot>& day_grid(int day) const;
  std::vector<ContextSnapshot> build_day(int day) const;

  ParticipantProfile profile_;
  std::uint64_t seed_;
  mutable std::map<int, std::vector<ContextSnapshot>> cache_;
};

}  // namespace receptive::sim
