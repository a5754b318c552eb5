#include "dps/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dps/parallel.hpp"

namespace dps {

namespace {

constexpr double kSmallAlpha = 0.1;
constexpr double kReachableMass = 1e-12;

/// Coefficient of x[r][m] in the equilibrium row of state k (inflow
/// positive, outflow negative).
double equilibrium_coefficient(const ModelParams& params, int k, int r, int m) {
  const int A = params.packet_bits();
  const double alpha = params.alpha();
  if (r < k) {
    // l = r in [max(0, k-A), k-1], m in [0, l+A-k]: an arrival lifts the state to >= k.
    return (r >= k - A && m <= r + A - k) ? alpha : 0.0;
  }
  if (r > std::min(k + params.max_bits() - 1, params.max_state())) return 0.0;
  if (m >= r - k + A + 1) return -1.0;               // below k with or without an arrival
  if (m >= r - k + 1) return -(1.0 - alpha);         // below k only without an arrival
  return 0.0;
}

}  // namespace

LpProblem build_lp(const ModelParams& params, double power_budget) {
  if (std::isnan(power_budget) || power_budget < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "power budget must be >= 0");
  }
  LpProblem lp{params, power_budget, {}, {}, params.alpha() < kSmallAlpha ? 1.0 / params.alpha() : 1.0};
  for (int k = 0; k <= params.max_state(); ++k)
    for (int m = params.min_action(k); m <= params.max_action(k); ++m) lp.variables.push_back({k, m});

  const std::size_t n = lp.variables.size();
  auto& prog = lp.program;
  prog.objective.resize(n);
  prog.objective_constant = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = lp.variables[j];
    prog.variable_names.push_back("x_" + std::to_string(v.state) + "_" + std::to_string(v.bits));
    prog.objective[j] = static_cast<double>(v.state) / params.arrival_rate();
  }

  for (int k = 1; k <= params.max_state(); ++k) {
    LinearConstraint row{"equilibrium_" + std::to_string(k), std::vector<double>(n, 0.0), ConstraintSense::Equal, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = lp.variables[j];
      row.coefficients[j] = lp.equilibrium_scale * equilibrium_coefficient(params, k, v.state, v.bits);
    }
    prog.constraints.push_back(std::move(row));
  }
  prog.constraints.push_back({"normalization", std::vector<double>(n, 1.0), ConstraintSense::Equal, 1.0});
  if (std::isfinite(power_budget)) {
    LinearConstraint row{"power_budget", std::vector<double>(n), ConstraintSense::LessEqual, power_budget};
    for (std::size_t j = 0; j < n; ++j) row.coefficients[j] = params.power(lp.variables[j].bits);
    prog.constraints.push_back(std::move(row));
  }
  return lp;
}

std::vector<double> equilibrium_residuals(const LpProblem& lp, std::span<const double> x) {
  std::vector<double> out;
  for (int k = 1; k <= lp.params.max_state(); ++k) {
    double r = 0.0;
    for (std::size_t j = 0; j < lp.variables.size(); ++j) {
      const auto& v = lp.variables[j];
      r += equilibrium_coefficient(lp.params, k, v.state, v.bits) * x[j];
    }
    out.push_back(r);
  }
  return out;
}

std::vector<double> occupation_measure(const LpProblem& lp, const Policy& policy, const StationaryDistribution& pi) {
  std::vector<double> x(lp.variables.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& v = lp.variables[j];
    x[j] = pi.pi[static_cast<std::size_t>(v.state)] * policy(static_cast<std::size_t>(v.state), static_cast<std::size_t>(v.bits));
  }
  return x;
}

Matrix LpSolution::occupation(const LpProblem& lp) const {
  Matrix out(lp.params.num_states(), lp.params.num_actions());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& v = lp.variables[j];
    out(static_cast<std::size_t>(v.state), static_cast<std::size_t>(v.bits)) = x[j];
  }
  return out;
}

LpSolution solve_simplex(const LpProblem& lp, const SimplexOptions& options) {
  const auto result = solve_linear_program(lp.program, options);
  LpSolution out;
  out.status = result.status;
  out.pivots = result.pivots;
  if (result.status != LpStatus::Optimal) return out;

  out.x = result.x;
  out.delay = result.objective;
  if (out.delay < 0.0 && out.delay >= -1e-10) out.delay = 0.0;
  for (std::size_t j = 0; j < out.x.size(); ++j) out.power += lp.params.power(lp.variables[j].bits) * out.x[j];
  out.min_reduced_cost = result.min_reduced_cost;
  for (double r : equilibrium_residuals(lp, out.x))
    out.max_equilibrium_residual = std::max(out.max_equilibrium_residual, std::abs(r));
  double total = 0.0;
  for (double v : out.x) total += v;
  out.normalization_residual = std::abs(total - 1.0);
  out.budget_excess = std::max(0.0, out.power - lp.power_budget);
  out.min_value = result.min_value;
  return out;
}

Policy recover_policy(const LpProblem& lp, const LpSolution& solution) {
  if (solution.status != LpStatus::Optimal) {
    throw Error(ErrorCode::DegenerateSolution, "no policy to recover from a non-optimal LP");
  }
  const auto& params = lp.params;
  const int K = params.max_state();
  const int A = params.packet_bits();
  const double alpha = params.alpha();
  Matrix occ = solution.occupation(lp);
  Matrix f(params.num_states(), params.num_actions());

  // leads[k]: state k has been assigned and reaches the LP support.
  std::vector<char> leads(params.num_states(), 0);
  std::vector<int> completion(params.num_states(), 0);
  int previous = 0;
  for (std::size_t k = 0; k < params.num_states(); ++k) {
    auto row = occ.row(k);
    for (double& v : row) v = std::max(v, 0.0);
    double mass = 0.0;
    for (double v : row) mass += v;
    if (mass > kReachableMass) {
      for (std::size_t m = 0; m < row.size(); ++m) f(k, m) = row[m] / mass;
      leads[k] = 1;
    }
    completion[k] = completion_action(params, static_cast<int>(k), previous);
    for (std::size_t m = 0; m < row.size(); ++m)
      if (f(k, m) > 0.0) previous = static_cast<int>(m);
  }

  // Unvisited rows: the completion action when it leads back into the
  // support, otherwise the first feasible action that does. Without this
  // the unvisited states can close into a second recurrent class.
  const auto enters = [&](int q) {
    return (alpha < 1.0 && leads[static_cast<std::size_t>(q)]) ||
           (q + A <= K && leads[static_cast<std::size_t>(q + A)]);
  };
  for (bool grew = true; grew;) {
    grew = false;
    for (int k = 0; k <= K; ++k) {
      if (leads[static_cast<std::size_t>(k)]) continue;
      int pick = enters(k - completion[static_cast<std::size_t>(k)]) ? completion[static_cast<std::size_t>(k)] : -1;
      for (int m = params.min_action(k); pick < 0 && m <= params.max_action(k); ++m) {
        if (enters(k - m)) pick = m;
      }
      if (pick < 0) continue;
      f(static_cast<std::size_t>(k), static_cast<std::size_t>(pick)) = 1.0;
      leads[static_cast<std::size_t>(k)] = 1;
      grew = true;
    }
  }
  for (int k = 0; k <= K; ++k) {
    if (!leads[static_cast<std::size_t>(k)]) f(static_cast<std::size_t>(k), static_cast<std::size_t>(completion[static_cast<std::size_t>(k)])) = 1.0;
  }

  try {
    return Policy::from_matrix(params, std::move(f));
  } catch (const Error& e) {
    throw Error(ErrorCode::DegenerateSolution, std::string("recovered policy is invalid: ") + e.what());
  }
}

std::vector<SweepPoint> sweep(const ModelParams& params, std::span<const double> budgets,
                              const SimplexOptions& options) {
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw Error(ErrorCode::InvalidParameter, "sweep budgets must be ascending");
  }
  std::vector<SweepPoint> out(budgets.size());
  parallel_for(budgets.size(), [&](std::size_t i) {
    out[i].budget = budgets[i];
    try {
      out[i].solution = solve_simplex(build_lp(params, budgets[i]), options);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IterationLimit) throw;
      out[i].solution.status = LpStatus::IterationLimit;
    }
  });
  return out;
}

}  // namespace dps
