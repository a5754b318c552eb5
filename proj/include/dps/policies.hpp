#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dps/model.hpp"

namespace dps {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// All deterministic policies of a model, in lexicographic order of their
/// action vectors (a_0, ..., a_K). State K varies fastest.
class DeterministicPolicySpace {
 public:
  /// Throws EnumerationTooLarge when the number of policies exceeds `cap`.
  explicit DeterministicPolicySpace(const ModelParams& params, std::uint64_t cap = kDefaultEnumerationCap);

  /// Product of the feasible-action counts, or nullopt on 64-bit overflow.
  static std::optional<std::uint64_t> count(const ModelParams& params);

  [[nodiscard]] std::uint64_t size() const noexcept { return size_; }
  [[nodiscard]] std::vector<int> actions(std::uint64_t index) const;
  [[nodiscard]] Policy policy(std::uint64_t index) const;

  /// Visits every action vector in order; stops early when `visit` returns false.
  void for_each(const std::function<bool(std::uint64_t, const std::vector<int>&)>& visit) const;

 private:
  ModelParams params_;
  std::vector<int> lowest_;
  std::vector<int> radix_;
  std::uint64_t size_ = 0;
};

/// Threshold representation of `policy` when its action map is
/// nondecreasing and at most one row splits between two adjacent actions.
std::optional<ThresholdPolicy> is_threshold(const ModelParams& params, const Policy& policy);

/// Legal variants of a deterministic threshold vector with one threshold
/// raised by one. The input is completed first, so k_M = K always.
std::vector<ThresholdPolicy> neighbors_increase_threshold(const ModelParams& params, const ThresholdPolicy& tp);

/// Starting point of the frontier walk: k_m = min(m, A), completed.
ThresholdPolicy initial_threshold_policy(const ModelParams& params);

}  // namespace dps
