#include "dps/sim.hpp"

#include <algorithm>

namespace dps {

namespace {

int draw_action(std::span<const double> row, double u) {
  double acc = 0.0;
  int last = 0;
  for (std::size_t m = 0; m < row.size(); ++m) {
    if (row[m] <= 0.0) continue;
    last = static_cast<int>(m);
    acc += row[m];
    if (u < acc) return last;
  }
  return last;  // rounding left u above the cumulative sum
}

}  // namespace

SimulationResult simulate(const ModelParams& params, const Policy& policy, std::uint64_t slots, std::uint64_t seed,
                          std::ostream* trace) {
  if (slots < 1) throw Error(ErrorCode::InvalidParameter, "need at least one slot");
  if (policy.num_states() != params.num_states() || policy.num_actions() != params.num_actions()) {
    throw Error(ErrorCode::InvalidPolicy, "policy shape does not match the model");
  }
  Rng arrivals(seed, 0);
  Rng choices(seed, 1);

  const std::uint64_t burn_in = std::min<std::uint64_t>(slots / 10, 10'000);
  const int A = params.packet_bits();
  const int Q = params.buffer_bits();

  SimulationResult out;
  out.slots = slots;
  out.seed = seed;
  out.state_occupancy.assign(params.num_states(), 0.0);
  std::vector<std::uint64_t> visits(params.num_states(), 0);
  double power_sum = 0.0;
  double queue_sum = 0.0;

  if (trace) *trace << "n,a,t,s,q\n";
  int q = 0;
  for (std::uint64_t n = 0; n < slots; ++n) {
    const int a = arrivals.uniform() < params.alpha() ? 1 : 0;
    const int t = q + A * a;
    if (t > params.max_state()) {
      ++out.overflow_violations;
      q = std::min(q, Q);
      continue;
    }
    const int s = draw_action(policy.row(static_cast<std::size_t>(t)), choices.uniform());
    if (trace && n < kMaxTraceRows) *trace << n << ',' << a << ',' << t << ',' << s << ',' << q << '\n';
    if (n >= burn_in) {
      power_sum += params.power(s);
      queue_sum += q;
      ++visits[static_cast<std::size_t>(t)];
    }
    q = t - s;
    if (q < 0) {
      ++out.underflow_violations;
      q = 0;
    } else if (q > Q) {
      ++out.overflow_violations;
      q = Q;
    }
  }

  out.measured_slots = slots - burn_in;
  const auto measured = static_cast<double>(out.measured_slots);
  out.empirical_power = power_sum / measured;
  out.empirical_delay = queue_sum / measured / params.arrival_rate();
  for (std::size_t k = 0; k < visits.size(); ++k) out.state_occupancy[k] = static_cast<double>(visits[k]) / measured;
  return out;
}

}  // namespace dps
