#include "dps/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dps {

std::optional<std::uint64_t> DeterministicPolicySpace::count(const ModelParams& params) {
  std::uint64_t total = 1;
  for (int k = 0; k <= params.max_state(); ++k) {
    const auto n = static_cast<std::uint64_t>(params.max_action(k) - params.min_action(k) + 1);
    if (total > std::numeric_limits<std::uint64_t>::max() / n) return std::nullopt;
    total *= n;
  }
  return total;
}

DeterministicPolicySpace::DeterministicPolicySpace(const ModelParams& params, std::uint64_t cap) : params_(params) {
  const auto total = count(params);
  if (!total || *total > cap) {
    throw Error(ErrorCode::EnumerationTooLarge,
                (total ? std::to_string(*total) : std::string("more than 2^64")) +
                    " deterministic policies exceed the cap of " + std::to_string(cap));
  }
  size_ = *total;
  for (int k = 0; k <= params.max_state(); ++k) {
    lowest_.push_back(params.min_action(k));
    radix_.push_back(params.max_action(k) - params.min_action(k) + 1);
  }
}

std::vector<int> DeterministicPolicySpace::actions(std::uint64_t index) const {
  std::vector<int> a(radix_.size());
  for (std::size_t k = radix_.size(); k-- > 0;) {
    const auto r = static_cast<std::uint64_t>(radix_[k]);
    a[k] = lowest_[k] + static_cast<int>(index % r);
    index /= r;
  }
  return a;
}

Policy DeterministicPolicySpace::policy(std::uint64_t index) const {
  return Policy::deterministic(params_, actions(index));
}

void DeterministicPolicySpace::for_each(
    const std::function<bool(std::uint64_t, const std::vector<int>&)>& visit) const {
  std::vector<int> a = lowest_;
  for (std::uint64_t index = 0; index < size_; ++index) {
    if (!visit(index, a)) return;
    // Odometer step, last state fastest.
    for (std::size_t k = a.size(); k-- > 0;) {
      if (a[k] - lowest_[k] + 1 < radix_[k]) {
        ++a[k];
        break;
      }
      a[k] = lowest_[k];
    }
  }
}

std::optional<ThresholdPolicy> is_threshold(const ModelParams& params, const Policy& policy) {
  // Each state maps to an action interval [lo, hi]; hi = lo + 1 for the
  // single allowed fractional row.
  std::optional<RandomizedThreshold> split;
  std::size_t split_state = 0;
  std::vector<int> lo(policy.num_states());
  std::vector<int> hi(policy.num_states());
  for (std::size_t k = 0; k < policy.num_states(); ++k) {
    if (const auto a = policy.action(k)) {
      lo[k] = hi[k] = *a;
      continue;
    }
    if (split) return std::nullopt;
    std::vector<int> support;
    const auto row = policy.row(k);
    for (std::size_t m = 0; m < row.size(); ++m)
      if (row[m] > kProbabilityTolerance) support.push_back(static_cast<int>(m));
    if (support.size() != 2 || support[1] != support[0] + 1) return std::nullopt;
    split = RandomizedThreshold{support[0], row[static_cast<std::size_t>(support[0])]};
    split_state = k;
    lo[k] = support[0];
    hi[k] = support[1];
  }
  for (std::size_t k = 1; k < lo.size(); ++k)
    if (lo[k] < hi[k - 1]) return std::nullopt;

  ThresholdPolicy tp;
  tp.thresholds.assign(params.num_actions(), 0);
  for (std::size_t m = 0; m < params.num_actions(); ++m) {
    int last = 0;
    for (std::size_t k = 0; k < lo.size(); ++k)
      if (lo[k] <= static_cast<int>(m)) last = static_cast<int>(k);
    tp.thresholds[m] = last;
  }
  if (tp.thresholds[0] != 0) return std::nullopt;
  if (split) {
    // The split state must be the last state assigned to m*.
    if (tp.thresholds[static_cast<std::size_t>(split->index)] != static_cast<int>(split_state)) return std::nullopt;
    tp.randomized = split;
  }
  return tp;
}

ThresholdPolicy initial_threshold_policy(const ModelParams& params) {
  ThresholdPolicy tp;
  for (int m = 0; m <= params.max_bits(); ++m) tp.thresholds.push_back(std::min(m, params.packet_bits()));
  return complete_thresholds(params, tp);
}

std::vector<ThresholdPolicy> neighbors_increase_threshold(const ModelParams& params, const ThresholdPolicy& tp) {
  if (tp.randomized) throw Error(ErrorCode::InvalidPolicy, "neighbor generation needs a deterministic threshold vector");
  const auto base = complete_thresholds(params, tp);
  const int K = params.max_state();
  std::vector<ThresholdPolicy> out;
  for (std::size_t m = 1; m < base.thresholds.size(); ++m) {
    ThresholdPolicy next = base;
    ++next.thresholds[m];
    if (next.thresholds[m] > K) continue;
    if (m + 1 < next.thresholds.size() && next.thresholds[m] > next.thresholds[m + 1]) continue;
    try {
      next = complete_thresholds(params, next);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleThresholds) throw;
      continue;
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace dps
