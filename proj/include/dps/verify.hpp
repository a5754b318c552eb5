#pragma once

// Random instance generators and the cross-validation battery behind
// `dps verify`.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dps/model.hpp"
#include "dps/random.hpp"

namespace dps {

/// Random row over the feasible actions of state k: with probability
/// `deterministic_share` a single action, otherwise random weights on all
/// feasible actions.
std::vector<double> random_row(const ModelParams& params, int k, Rng& rng, double deterministic_share = 0.3);

Policy random_policy(const ModelParams& params, Rng& rng, double deterministic_share = 0.3);

/// Two nonsingular policies that differ in exactly one reachable row and
/// have different average power. Returns nullopt if none was found in
/// `attempts` tries.
std::optional<std::pair<Policy, Policy>> random_one_row_pair(const ModelParams& params, Rng& rng,
                                                             int attempts = 1000);

/// Valid parameters with A in 1..3, M in A..A+2 and at most `max_policies`
/// deterministic policies.
ModelParams random_params(Rng& rng, std::uint64_t max_policies);

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest observed error
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int trials = 50;
  /// Tolerance for the mixing-geometry checks (collinearity, slope).
  double tolerance = 1e-9;
  std::uint64_t sim_slots = 1'000'000;
  int sim_policies = 10;
  int lp_budgets = 50;
};

std::vector<CheckResult> run_verification(const ModelParams& params, const VerifyOptions& options);

}  // namespace dps
