#pragma once

// Dense two-phase tableau simplex with Bland's anti-cycling rule.
// Solves   minimize c.x + constant   s.t.  rows (<=, =, >=),  x >= 0.

#include <cstddef>
#include <string>
#include <vector>

namespace dps {

enum class ConstraintSense { LessEqual, Equal, GreaterEqual };

struct LinearConstraint {
  std::string name;
  std::vector<double> coefficients;
  ConstraintSense sense = ConstraintSense::Equal;
  double rhs = 0.0;
};

struct LinearProgram {
  std::vector<std::string> variable_names;
  std::vector<double> objective;
  double objective_constant = 0.0;
  std::vector<LinearConstraint> constraints;

  [[nodiscard]] std::size_t num_variables() const noexcept { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status) noexcept;

struct SimplexOptions {
  std::size_t max_pivots = 1'000'000;
  double pivot_tolerance = 1e-11;    // smallest usable tableau entry
  double cost_tolerance = 1e-11;     // reduced costs below -this may enter
  double feasibility_tolerance = 1e-9;
};

struct SimplexResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;            // includes objective_constant
  std::size_t pivots = 0;
  /// Smallest reduced cost over all structural and slack columns at the
  /// final basis. Nonnegative (up to tolerance) certifies optimality.
  double min_reduced_cost = 0.0;
  /// Largest constraint violation of x against the original rows.
  double max_violation = 0.0;
  /// Most negative entry of x (0 when all are nonnegative).
  double min_value = 0.0;
  std::size_t redundant_rows = 0;
};

/// Throws dps::Error(IterationLimit) when the pivot budget runs out.
SimplexResult solve_linear_program(const LinearProgram& lp, const SimplexOptions& options = {});

/// Constraint violation of `x` against `lp`, in original units.
double max_constraint_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace dps
