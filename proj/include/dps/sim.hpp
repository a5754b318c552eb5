#pragma once

// Seeded Monte-Carlo simulation of the buffer under a fixed policy.
//
// Stream 0 of dps::Rng drives arrivals and stream 1 drives transmit-size
// draws, so changing a policy does not perturb the arrival sample path.

#include <cstdint>
#include <ostream>
#include <vector>

#include "dps/model.hpp"
#include "dps/random.hpp"

namespace dps {

struct SimulationResult {
  std::uint64_t slots = 0;
  std::uint64_t measured_slots = 0;  // slots after burn-in
  std::uint64_t seed = 0;
  double empirical_power = 0.0;
  /// Mean buffer content over the arrival rate.
  double empirical_delay = 0.0;
  /// Fraction of measured slots spent in each total-backlog state.
  std::vector<double> state_occupancy;
  std::uint64_t overflow_violations = 0;
  std::uint64_t underflow_violations = 0;

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

inline constexpr std::uint64_t kMaxTraceRows = 100'000;

/// Burn-in is min(slots / 10, 10^4) slots. When `trace` is non-null, the
/// first kMaxTraceRows slots are written as CSV rows "n,a,t,s,q".
SimulationResult simulate(const ModelParams& params, const Policy& policy, std::uint64_t slots, std::uint64_t seed,
                          std::ostream* trace = nullptr);

}  // namespace dps
