#include "dps/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dps {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::AlphaAboveOne: return "AlphaAboveOne";
    case ErrorCode::MLessThanA: return "MLessThanA";
    case ErrorCode::PowerNotIncreasingPerBit: return "PowerNotIncreasingPerBit";
    case ErrorCode::PowerZeroNonzero: return "PowerZeroNonzero";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::StateOutOfRange: return "StateOutOfRange";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::InfeasibleThresholds: return "InfeasibleThresholds";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::SingularChain: return "SingularChain";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::RowDiffCountMismatch: return "RowDiffCountMismatch";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::DegenerateSolution: return "DegenerateSolution";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ModelParams validate_params(const RawParams& raw) {
  if (!(raw.alpha > 0.0)) {
    throw Error(ErrorCode::NonPositiveAlpha, "alpha must be > 0, got " + std::to_string(raw.alpha));
  }
  if (raw.alpha > 1.0) {
    throw Error(ErrorCode::AlphaAboveOne, "alpha must be <= 1, got " + std::to_string(raw.alpha));
  }
  if (raw.packet_bits < 1) throw Error(ErrorCode::InvalidParameter, "A must be a positive integer");
  if (raw.max_bits < 1) throw Error(ErrorCode::InvalidParameter, "M must be a positive integer");
  if (raw.buffer_bits < 0) throw Error(ErrorCode::InvalidParameter, "Q must be nonnegative");
  if (raw.max_bits < raw.packet_bits) {
    throw Error(ErrorCode::MLessThanA, "M (" + std::to_string(raw.max_bits) + ") must be >= A (" +
                                           std::to_string(raw.packet_bits) + ")");
  }
  if (raw.power.size() != static_cast<std::size_t>(raw.max_bits) + 1) {
    throw Error(ErrorCode::InvalidParameter, "power table needs M+1 = " + std::to_string(raw.max_bits + 1) +
                                                 " entries, got " + std::to_string(raw.power.size()));
  }
  for (double p : raw.power) {
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidParameter, "power values must be finite");
  }
  if (raw.power[0] != 0.0) throw Error(ErrorCode::PowerZeroNonzero, "power[0] must be 0");
  for (std::size_t m = 1; m < raw.power.size(); ++m) {
    if (!(raw.power[m] > raw.power[m - 1])) {
      std::ostringstream os;
      os << "power must be strictly increasing: power[" << m << "] = " << raw.power[m] << " <= power[" << m - 1
         << "] = " << raw.power[m - 1];
      throw Error(ErrorCode::PowerNotIncreasingPerBit, os.str());
    }
    // Consecutive checks suffice: the per-bit sequence is then increasing.
    if (m >= 2 && !(raw.power[m] / static_cast<double>(m) > raw.power[m - 1] / static_cast<double>(m - 1))) {
      std::ostringstream os;
      os << "power per bit must be strictly increasing: power[" << m << "]/" << m << " = "
         << raw.power[m] / static_cast<double>(m) << " <= power[" << m - 1 << "]/" << m - 1 << " = "
         << raw.power[m - 1] / static_cast<double>(m - 1);
      throw Error(ErrorCode::PowerNotIncreasingPerBit, os.str());
    }
  }

  ModelParams p;
  p.alpha_ = raw.alpha;
  p.packet_bits_ = raw.packet_bits;
  p.max_bits_ = raw.max_bits;
  p.buffer_bits_ = raw.buffer_bits;
  p.power_ = raw.power;
  return p;
}

ModelParams ModelParams::with_scaled_power(double factor) const {
  RawParams r = raw();
  for (double& p : r.power) p *= factor;
  return validate_params(r);
}

RawParams ModelParams::raw() const {
  return RawParams{alpha_, packet_bits_, max_bits_, buffer_bits_, power_};
}

std::vector<int> feasible_actions(const ModelParams& params, int k) {
  if (k < 0 || k > params.max_state()) {
    throw Error(ErrorCode::StateOutOfRange,
                "state " + std::to_string(k) + " outside 0.." + std::to_string(params.max_state()));
  }
  std::vector<int> out;
  for (int m = params.min_action(k); m <= params.max_action(k); ++m) out.push_back(m);
  return out;
}

// ---------------------------------------------------------------------------
// Policy

Policy Policy::from_matrix(const ModelParams& params, Matrix f) {
  if (f.rows() != params.num_states() || f.cols() != params.num_actions()) {
    throw Error(ErrorCode::InvalidPolicy, "policy must be " + std::to_string(params.num_states()) + "x" +
                                              std::to_string(params.num_actions()));
  }
  for (std::size_t k = 0; k < f.rows(); ++k) {
    double sum = 0.0;
    bool clamped = false;
    for (std::size_t m = 0; m < f.cols(); ++m) {
      double& v = f(k, m);
      if (!(v >= -kProbabilityTolerance && v <= 1.0 + kProbabilityTolerance)) {
        throw Error(ErrorCode::InvalidPolicy, "f[" + std::to_string(k) + "][" + std::to_string(m) +
                                                  "] = " + std::to_string(v) + " is not a probability");
      }
      if (v != 0.0 && !params.is_feasible(static_cast<int>(k), static_cast<int>(m))) {
        throw Error(ErrorCode::InvalidPolicy, "f[" + std::to_string(k) + "][" + std::to_string(m) +
                                                  "] must be 0 (underflow or overflow)");
      }
      if (v < 0.0 || v > 1.0) {
        v = std::clamp(v, 0.0, 1.0);
        clamped = true;
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << k << " sums to " << sum;
      throw Error(ErrorCode::InvalidPolicy, os.str());
    }
    if (clamped) {
      for (double& v : f.row(k)) v /= sum;
    }
  }
  return Policy(std::move(f));
}

Policy Policy::deterministic(const ModelParams& params, std::span<const int> actions) {
  if (actions.size() != params.num_states()) {
    throw Error(ErrorCode::InvalidPolicy, "need one action per state");
  }
  Matrix f(params.num_states(), params.num_actions());
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const int m = actions[k];
    if (!params.is_feasible(static_cast<int>(k), m)) {
      throw Error(ErrorCode::InvalidPolicy,
                  "action " + std::to_string(m) + " infeasible in state " + std::to_string(k));
    }
    f(k, static_cast<std::size_t>(m)) = 1.0;
  }
  return Policy(std::move(f));
}

std::optional<int> Policy::action(std::size_t k) const {
  const auto r = row(k);
  for (std::size_t m = 0; m < r.size(); ++m) {
    if (std::abs(r[m] - 1.0) <= kProbabilityTolerance) return static_cast<int>(m);
  }
  return std::nullopt;
}

bool Policy::is_deterministic() const {
  for (std::size_t k = 0; k < num_states(); ++k)
    if (!action(k)) return false;
  return true;
}

std::vector<int> Policy::actions() const {
  std::vector<int> out(num_states());
  for (std::size_t k = 0; k < num_states(); ++k) {
    const auto a = action(k);
    if (!a) throw Error(ErrorCode::InvalidPolicy, "row " + std::to_string(k) + " is not deterministic");
    out[k] = *a;
  }
  return out;
}

std::vector<double> Policy::power_per_state(const ModelParams& params) const {
  std::vector<double> p(num_states(), 0.0);
  const auto table = params.power_table();
  for (std::size_t k = 0; k < num_states(); ++k) p[k] = dot(row(k), table);
  return p;
}

// ---------------------------------------------------------------------------
// Thresholds

int completion_action(const ModelParams& params, int k, int previous) {
  return std::max(previous, params.min_action(k));
}

namespace {

void check_threshold_shape(const ModelParams& params, const ThresholdPolicy& tp) {
  const auto& t = tp.thresholds;
  if (t.size() != params.num_actions()) {
    throw Error(ErrorCode::InfeasibleThresholds, "need M+1 = " + std::to_string(params.num_actions()) +
                                                     " thresholds, got " + std::to_string(t.size()));
  }
  if (t[0] != 0) throw Error(ErrorCode::InfeasibleThresholds, "k_0 must be 0");
  for (std::size_t m = 1; m < t.size(); ++m) {
    if (t[m] < t[m - 1]) throw Error(ErrorCode::InfeasibleThresholds, "thresholds must be nondecreasing");
  }
  if (tp.randomized) {
    const auto& r = *tp.randomized;
    if (r.index < 0 || r.index + 1 >= static_cast<int>(t.size())) {
      throw Error(ErrorCode::InfeasibleThresholds, "randomized index must be in 0..M-1");
    }
    if (!(r.weight >= 0.0 && r.weight <= 1.0)) {
      throw Error(ErrorCode::InfeasibleThresholds, "randomization weight must be in [0, 1]");
    }
    const auto mi = static_cast<std::size_t>(r.index);
    const int lower = mi == 0 ? -1 : t[mi - 1];
    if (t[mi] <= lower || t[mi] > params.max_state()) {
      throw Error(ErrorCode::InfeasibleThresholds, "randomized threshold selects no state");
    }
  }
}

}  // namespace

std::vector<int> threshold_actions(const ModelParams& params, const ThresholdPolicy& tp) {
  check_threshold_shape(params, tp);
  const int K = params.max_state();
  std::vector<int> actions(params.num_states());
  std::size_t m = 0;
  for (int k = 0; k <= K; ++k) {
    while (m < tp.thresholds.size() && tp.thresholds[m] < k) ++m;
    int a;
    if (m < tp.thresholds.size()) {
      a = static_cast<int>(m);
      if (!params.is_feasible(k, a)) {
        throw Error(ErrorCode::InfeasibleThresholds,
                    "state " + std::to_string(k) + " would transmit infeasible " + std::to_string(a) + " bits");
      }
    } else {
      a = completion_action(params, k, actions[static_cast<std::size_t>(k - 1)]);
    }
    actions[static_cast<std::size_t>(k)] = a;
  }
  if (tp.randomized) {
    const auto& r = *tp.randomized;
    const int k = tp.thresholds[static_cast<std::size_t>(r.index)];
    if ((r.weight > 0.0 && !params.is_feasible(k, r.index)) ||
        (r.weight < 1.0 && !params.is_feasible(k, r.index + 1))) {
      throw Error(ErrorCode::InfeasibleThresholds, "randomized split infeasible in state " + std::to_string(k));
    }
  }
  return actions;
}

ThresholdPolicy complete_thresholds(const ModelParams& params, const ThresholdPolicy& tp) {
  const auto actions = threshold_actions(params, tp);
  ThresholdPolicy out;
  out.randomized = tp.randomized;
  out.thresholds.assign(params.num_actions(), 0);
  for (std::size_t m = 0; m < params.num_actions(); ++m) {
    int last = 0;
    for (std::size_t k = 0; k < actions.size(); ++k)
      if (actions[k] <= static_cast<int>(m)) last = static_cast<int>(k);
    out.thresholds[m] = last;
  }
  return out;
}

Policy threshold_to_policy(const ModelParams& params, const ThresholdPolicy& tp) {
  const auto actions = threshold_actions(params, tp);
  Matrix f(params.num_states(), params.num_actions());
  for (std::size_t k = 0; k < actions.size(); ++k) f(k, static_cast<std::size_t>(actions[k])) = 1.0;
  if (tp.randomized) {
    const auto& r = *tp.randomized;
    const auto k = static_cast<std::size_t>(tp.thresholds[static_cast<std::size_t>(r.index)]);
    auto row = f.row(k);
    std::fill(row.begin(), row.end(), 0.0);
    row[static_cast<std::size_t>(r.index)] = r.weight;
    row[static_cast<std::size_t>(r.index) + 1] = 1.0 - r.weight;
  }
  return Policy::from_matrix(params, std::move(f));
}

}  // namespace dps
