#pragma once

// Markov reward process of the total backlog t[n] under a fixed policy:
// transition matrix, stationary distribution, average power and delay,
// and the exact geometry of mixing two policies that differ in one state.

#include <functional>
#include <vector>

#include "dps/linalg.hpp"
#include "dps/model.hpp"

namespace dps {

inline constexpr double kPivotTolerance = 1e-12;

/// lambda(j, i) is the probability of moving from state i to state j, so
/// each column is a distribution over next states.
struct TransitionMatrix {
  Matrix lambda;

  [[nodiscard]] std::size_t num_states() const noexcept { return lambda.rows(); }
  [[nodiscard]] double from_to(std::size_t i, std::size_t j) const { return lambda(j, i); }
};

/// Adds the two outcomes of every (state, transmit size) pair: i -> i-m
/// without an arrival and i -> i-m+A with one.
TransitionMatrix build_transition_enumerative(const ModelParams& params, const Policy& policy);

/// The same matrix written as the six-case closed form in (i-j, j).
TransitionMatrix build_transition_piecewise(const ModelParams& params, const Policy& policy);

struct StationaryDistribution {
  std::vector<double> pi;
};

/// H = [1^T ; rows 0..K-1 of (Lambda - I)]. Solving H pi = e_0 gives pi.
Matrix stationary_system(const TransitionMatrix& t);

/// Throws SingularChain when H has a pivot below kPivotTolerance (more than
/// one recurrent class) and NumericalFailure when the solution has entries
/// below -1e-12.
StationaryDistribution stationary_distribution(const TransitionMatrix& t);

double average_power(const ModelParams& params, const Policy& policy, const StationaryDistribution& pi);

/// Little's law: mean queue length over the mean arrival rate.
double average_delay(const ModelParams& params, const StationaryDistribution& pi);

struct DelayPowerPoint {
  double power = 0.0;
  double delay = 0.0;

  friend bool operator==(const DelayPowerPoint&, const DelayPowerPoint&) = default;
};

/// Everything computed for one policy; `h_inverse` is kept for the mixing
/// analysis so it is factored once.
struct ChainSolution {
  Matrix h_inverse;
  StationaryDistribution stationary;
  std::vector<double> power_per_state;
  DelayPowerPoint point;
};

ChainSolution solve_chain(const ModelParams& params, const Policy& policy);

DelayPowerPoint evaluate(const ModelParams& params, const Policy& policy);

enum class MixMode { Unrestricted, OneRow };

/// (1 - epsilon) F + epsilon F2. In OneRow mode the inputs must differ in
/// exactly one row.
Policy mix_policies(const ModelParams& params, const Policy& f, const Policy& f2, double epsilon,
                    MixMode mode = MixMode::Unrestricted);

/// Rows where the two policies differ.
std::vector<std::size_t> differing_rows(const Policy& f, const Policy& f2);

struct MixingAnalysis {
  std::size_t row = 0;              // k
  std::vector<double> delta;        // column k of H_{F2} - H_F
  double zeta = 0.0;                // p_{F2}[k] - p_F[k]
  std::vector<double> h_row;        // row k of H_F^{-1}
  double gain = 0.0;                // h_row . delta
  DelayPowerPoint base;             // (P_F, D_F)
  DelayPowerPoint other;            // (P_{F2}, D_{F2})

  /// epsilon -> (epsilon + epsilon g) / (1 + epsilon g).
  [[nodiscard]] double epsilon_prime(double epsilon) const;
  /// Point reached by mixing with weight epsilon.
  [[nodiscard]] DelayPowerPoint predict(double epsilon) const;
};

MixingAnalysis mixing_analysis(const ModelParams& params, const Policy& f, const Policy& f2);

struct SegmentSlope {
  double closed_form = 0.0;        // d^T H^{-1} delta / (alpha A (p^T H^{-1} delta - zeta))
  double finite_difference = 0.0;  // (D_{F2} - D_F) / (P_{F2} - P_F)
};

/// Slope dD/dP of the segment traced by mixing F and F2. Throws
/// DegenerateSegment when the powers coincide within 1e-12.
SegmentSlope segment_slope(const ModelParams& params, const Policy& f, const Policy& f2);

}  // namespace dps
