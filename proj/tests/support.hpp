#pragma once

// Reference instance and slow, independent oracles used by the tests.

#include <vector>

#include "dps/linalg.hpp"
#include "dps/model.hpp"
#include "dps/mrp.hpp"

namespace dps::testing {

ModelParams reference_params();
ModelParams make_params(double alpha, int A, int M, int Q, std::vector<double> power);

/// Lambda(j, i) built by following one slot of the buffer dynamics.
Matrix oracle_transition(const ModelParams& params, const Policy& policy);

/// Stationary distribution by iterating the lazy chain (I + Lambda) / 2.
std::vector<double> oracle_stationary(const Matrix& lambda);

DelayPowerPoint oracle_evaluate(const ModelParams& params, const Policy& policy);

/// Every deterministic action map, by depth-first recursion.
std::vector<std::vector<int>> oracle_action_maps(const ModelParams& params);

/// Largest amount by which any of `cloud` lies below the piecewise-linear
/// curve through `vertices` (ordered by decreasing power), looking only at
/// powers inside the curve's range. Points left of the curve count as
/// violations measured in power.
double oracle_hull_violation(const std::vector<DelayPowerPoint>& cloud, const std::vector<DelayPowerPoint>& vertices);

/// Smallest distance from `p` to any point of `cloud` (max-norm).
double distance_to_cloud(const DelayPowerPoint& p, const std::vector<DelayPowerPoint>& cloud);

}  // namespace dps::testing
