#pragma once

// System model of a single-buffer transmitter: Bernoulli packet arrivals,
// a bounded bit buffer and an adaptive number of bits sent per timeslot.
//
// States are indexed by the total backlog t = q + A*a (buffer content plus
// the packet that just arrived), so k ranges over 0..K with K = Q + A.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dps/error.hpp"
#include "dps/linalg.hpp"

namespace dps {

/// Absolute tolerance used when comparing probabilities.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Unvalidated parameter set, as read from flags or a parameter file.
struct RawParams {
  double alpha = 0.0;
  int packet_bits = 0;  // A
  int max_bits = 0;     // M
  int buffer_bits = 0;  // Q
  std::vector<double> power;
};

class ModelParams {
 public:
  /// Arrival probability per slot.
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  /// Bits per arriving packet (A).
  [[nodiscard]] int packet_bits() const noexcept { return packet_bits_; }
  /// Largest number of bits that can be sent in one slot (M).
  [[nodiscard]] int max_bits() const noexcept { return max_bits_; }
  /// Buffer capacity in bits (Q).
  [[nodiscard]] int buffer_bits() const noexcept { return buffer_bits_; }
  /// Largest total-backlog state, Q + A.
  [[nodiscard]] int max_state() const noexcept { return buffer_bits_ + packet_bits_; }
  [[nodiscard]] std::size_t num_states() const noexcept { return static_cast<std::size_t>(max_state()) + 1; }
  [[nodiscard]] std::size_t num_actions() const noexcept { return static_cast<std::size_t>(max_bits_) + 1; }

  [[nodiscard]] double power(int m) const { return power_.at(static_cast<std::size_t>(m)); }
  [[nodiscard]] std::span<const double> power_table() const noexcept { return power_; }

  /// Mean arrival rate in bits per slot.
  [[nodiscard]] double arrival_rate() const noexcept { return alpha_ * packet_bits_; }

  /// Lowest and highest transmit sizes that neither underflow nor overflow
  /// the buffer in state k.
  [[nodiscard]] int min_action(int k) const noexcept { return k > buffer_bits_ ? k - buffer_bits_ : 0; }
  [[nodiscard]] int max_action(int k) const noexcept { return k < max_bits_ ? k : max_bits_; }
  [[nodiscard]] bool is_feasible(int k, int m) const noexcept {
    return k >= 0 && k <= max_state() && m >= min_action(k) && m <= max_action(k);
  }

  /// Same model with every power value multiplied by `factor` (> 0).
  [[nodiscard]] ModelParams with_scaled_power(double factor) const;

  [[nodiscard]] RawParams raw() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  friend ModelParams validate_params(const RawParams& raw);
  ModelParams() = default;

  double alpha_ = 0.0;
  int packet_bits_ = 0;
  int max_bits_ = 0;
  int buffer_bits_ = 0;
  std::vector<double> power_;
};

/// Checks every model constraint and throws dps::Error naming the first
/// violated one.
ModelParams validate_params(const RawParams& raw);

/// Transmit sizes allowed in state k, ascending.
std::vector<int> feasible_actions(const ModelParams& params, int k);

/// Row-stochastic (K+1)x(M+1) matrix of transmit probabilities f[k][m].
class Policy {
 public:
  /// Validates the matrix against `params`. Rows whose sum is off by at most
  /// kProbabilityTolerance are renormalized; anything else is rejected.
  static Policy from_matrix(const ModelParams& params, Matrix probabilities);

  /// One transmit size per state.
  static Policy deterministic(const ModelParams& params, std::span<const int> actions);

  [[nodiscard]] std::size_t num_states() const noexcept { return f_.rows(); }
  [[nodiscard]] std::size_t num_actions() const noexcept { return f_.cols(); }
  [[nodiscard]] double operator()(std::size_t k, std::size_t m) const { return f_(k, m); }
  [[nodiscard]] std::span<const double> row(std::size_t k) const { return f_.row(k); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return f_; }

  /// The action of state k when its row is a unit vector.
  [[nodiscard]] std::optional<int> action(std::size_t k) const;
  [[nodiscard]] bool is_deterministic() const;
  /// Action map of a deterministic policy; throws InvalidPolicy otherwise.
  [[nodiscard]] std::vector<int> actions() const;

  /// Expected power spent in each state, sum_m P_m f[k][m].
  [[nodiscard]] std::vector<double> power_per_state(const ModelParams& params) const;

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  explicit Policy(Matrix f) : f_(std::move(f)) {}
  Matrix f_;
};

struct RandomizedThreshold {
  int index = 0;       // m*
  double weight = 0.0; // probability of m* at state k_{m*}; m*+1 gets the rest

  friend bool operator==(const RandomizedThreshold&, const RandomizedThreshold&) = default;
};

/// Nondecreasing thresholds k_0..k_M: state k transmits m bits when
/// k_{m-1} < k <= k_m (with k_{-1} = -1).
struct ThresholdPolicy {
  std::vector<int> thresholds;
  std::optional<RandomizedThreshold> randomized;

  friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
  friend auto operator<=>(const ThresholdPolicy& a, const ThresholdPolicy& b) {
    return a.thresholds <=> b.thresholds;
  }
};

/// Action map induced by the thresholds (the randomized state reports m*).
/// States above k_M get the smallest feasible action not below the
/// action of the previous state. Throws InfeasibleThresholds when a state
/// would be assigned an action outside its feasible set.
std::vector<int> threshold_actions(const ModelParams& params, const ThresholdPolicy& tp);

/// Canonical form of `tp`: thresholds recomputed from the completed action
/// map so that k_M = K.
ThresholdPolicy complete_thresholds(const ModelParams& params, const ThresholdPolicy& tp);

Policy threshold_to_policy(const ModelParams& params, const ThresholdPolicy& tp);

/// Smallest feasible action of state k that is not below `previous`.
int completion_action(const ModelParams& params, int k, int previous);

}  // namespace dps
