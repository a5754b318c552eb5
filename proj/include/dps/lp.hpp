#pragma once

// Delay minimization under an average-power budget, written as a linear
// program over occupation measures x[k][m] = pi_k f[k][m].

#include <limits>
#include <span>
#include <vector>

#include "dps/model.hpp"
#include "dps/mrp.hpp"
#include "dps/simplex.hpp"

namespace dps {

struct LpVariable {
  int state = 0;
  int bits = 0;
};

struct LpProblem {
  ModelParams params;
  double power_budget = std::numeric_limits<double>::infinity();
  /// Only feasible (state, bits) pairs get a variable.
  std::vector<LpVariable> variables;
  /// Rows: equilibrium for k = 1..K, normalization, then the power budget
  /// (omitted when the budget is infinite).
  LinearProgram program;
  /// Factor applied to the equilibrium rows (1/alpha when alpha < 0.1).
  double equilibrium_scale = 1.0;

  [[nodiscard]] std::size_t num_equilibrium_rows() const { return static_cast<std::size_t>(params.max_state()); }
};

LpProblem build_lp(const ModelParams& params, double power_budget);

/// Equilibrium rows evaluated at x, one per k = 1..K, in unscaled units
/// (inflow minus outflow).
std::vector<double> equilibrium_residuals(const LpProblem& lp, std::span<const double> x);

/// x[k][m] = pi_k f[k][m] laid out like lp.variables.
std::vector<double> occupation_measure(const LpProblem& lp, const Policy& policy, const StationaryDistribution& pi);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double delay = 0.0;  // objective value
  double power = 0.0;  // sum of P_m x[k][m]
  std::size_t pivots = 0;
  double min_reduced_cost = 0.0;
  double max_equilibrium_residual = 0.0;
  double normalization_residual = 0.0;
  double budget_excess = 0.0;  // max(0, power - budget)
  double min_value = 0.0;

  /// Occupation measure as a (K+1)x(M+1) matrix.
  [[nodiscard]] Matrix occupation(const LpProblem& lp) const;
};

LpSolution solve_simplex(const LpProblem& lp, const SimplexOptions& options = {});

/// Inverts x = pi f. Rows of states with pi_k <= 1e-12 are completed with
/// the smallest feasible action not below the previous state's largest
/// action. Throws DegenerateSolution when a row cannot be normalized.
Policy recover_policy(const LpProblem& lp, const LpSolution& solution);

struct SweepPoint {
  double budget = 0.0;
  LpSolution solution;
};

/// One solve per budget; budgets must be ascending. Iteration-limit
/// failures are recorded per budget instead of aborting the sweep.
std::vector<SweepPoint> sweep(const ModelParams& params, std::span<const double> budgets,
                              const SimplexOptions& options = {});

}  // namespace dps
