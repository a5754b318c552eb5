#include "dps/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dps/error.hpp"

namespace dps {

const char* to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double max_constraint_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < c.coefficients.size(); ++j) lhs += c.coefficients[j] * x[j];
    double v = 0.0;
    switch (c.sense) {
      case ConstraintSense::Equal: v = std::abs(lhs - c.rhs); break;
      case ConstraintSense::LessEqual: v = std::max(0.0, lhs - c.rhs); break;
      case ConstraintSense::GreaterEqual: v = std::max(0.0, c.rhs - lhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& options) : opt_(options), n_(lp.num_variables()) {
    const std::size_t m = lp.constraints.size();
    // Column layout: structural | slack/surplus | artificial | rhs.
    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (const auto& c : lp.constraints) {
      const auto sense = effective_sense(c);
      if (sense != ConstraintSense::Equal) ++slack_count;
      if (sense != ConstraintSense::LessEqual) ++artificial_count;
    }
    first_artificial_ = n_ + slack_count;
    cols_ = first_artificial_ + artificial_count;
    rows_.assign(m, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m, 0);

    std::size_t next_slack = n_;
    std::size_t next_artificial = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = lp.constraints[i];
      const double sign = c.rhs < 0.0 ? -1.0 : 1.0;
      auto& row = rows_[i];
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * c.coefficients[j];
      row[cols_] = sign * c.rhs;
      switch (effective_sense(c)) {
        case ConstraintSense::LessEqual:
          row[next_slack] = 1.0;
          basis_[i] = next_slack++;
          break;
        case ConstraintSense::GreaterEqual:
          row[next_slack++] = -1.0;
          row[next_artificial] = 1.0;
          basis_[i] = next_artificial++;
          break;
        case ConstraintSense::Equal:
          row[next_artificial] = 1.0;
          basis_[i] = next_artificial++;
          break;
      }
    }
  }

  /// Phase 1; returns false when the program is infeasible.
  bool find_feasible_basis() {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = 1.0;
    set_cost(cost);
    iterate(cols_);
    if (-cost_row_[cols_] > opt_.feasibility_tolerance) return false;
    drive_out_artificials();
    return true;
  }

  /// Phase 2; returns false when unbounded.
  bool optimize(const std::vector<double>& objective) {
    std::vector<double> cost(cols_, 0.0);
    std::copy(objective.begin(), objective.end(), cost.begin());
    set_cost(cost);
    return iterate(first_artificial_);
  }

  [[nodiscard]] std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < n_) x[basis_[i]] = rows_[i][cols_];
    return x;
  }

  [[nodiscard]] double min_reduced_cost() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < first_artificial_; ++j) worst = std::min(worst, cost_row_[j]);
    return worst;
  }

  [[nodiscard]] std::size_t pivots() const noexcept { return pivots_; }
  [[nodiscard]] std::size_t redundant_rows() const noexcept { return redundant_; }

 private:
  static ConstraintSense effective_sense(const LinearConstraint& c) {
    if (c.rhs >= 0.0 || c.sense == ConstraintSense::Equal) return c.sense;
    return c.sense == ConstraintSense::LessEqual ? ConstraintSense::GreaterEqual : ConstraintSense::LessEqual;
  }

  void set_cost(const std::vector<double>& cost) {
    cost_row_.assign(cols_ + 1, 0.0);
    std::copy(cost.begin(), cost.end(), cost_row_.begin());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double cb = cost_row_[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) cost_row_[j] -= cb * rows_[i][j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    if (++pivots_ > opt_.max_pivots) {
      throw Error(ErrorCode::IterationLimit, "simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
    }
    auto& prow = rows_[r];
    const double p = prow[c];
    for (double& v : prow) v /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      eliminate(rows_[i], prow, c);
    }
    eliminate(cost_row_, prow, c);
    basis_[r] = c;
  }

  static void eliminate(std::vector<double>& row, const std::vector<double>& prow, std::size_t c) {
    const double f = row[c];
    if (f == 0.0) return;
    for (std::size_t j = 0; j < row.size(); ++j) row[j] -= f * prow[j];
    row[c] = 0.0;
  }

  /// Bland's rule over columns [0, limit). Returns false when unbounded.
  bool iterate(std::size_t limit) {
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (cost_row_[j] < -opt_.cost_tolerance) {
          enter = j;
          break;
        }
      }
      if (enter == limit) return true;

      std::size_t leave = rows_.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double a = rows_[i][enter];
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = rows_[i][cols_] / a;
        if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave < rows_.size() && basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == rows_.size()) return false;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t col = first_artificial_;
      double largest = 1e-9;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(rows_[i][j]) > largest) {
          largest = std::abs(rows_[i][j]);
          col = j;
        }
      }
      if (col < first_artificial_) {
        pivot(i, col);
        ++i;
      } else {
        // Row is a combination of the others.
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        ++redundant_;
      }
    }
  }

  SimplexOptions opt_;
  std::size_t n_;
  std::size_t cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> cost_row_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
  std::size_t redundant_ = 0;
};

}  // namespace

SimplexResult solve_linear_program(const LinearProgram& lp, const SimplexOptions& options) {
  for (const auto& c : lp.constraints) {
    if (c.coefficients.size() != lp.num_variables()) {
      throw Error(ErrorCode::InvalidParameter, "constraint '" + c.name + "' has the wrong number of coefficients");
    }
  }
  Tableau t(lp, options);
  SimplexResult out;
  if (!t.find_feasible_basis()) {
    out.status = LpStatus::Infeasible;
    out.pivots = t.pivots();
    return out;
  }
  const bool bounded = t.optimize(lp.objective);
  out.pivots = t.pivots();
  out.redundant_rows = t.redundant_rows();
  out.x = t.solution();
  out.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
  out.min_reduced_cost = t.min_reduced_cost();
  out.objective = lp.objective_constant;
  for (std::size_t j = 0; j < out.x.size(); ++j) out.objective += lp.objective[j] * out.x[j];
  out.max_violation = max_constraint_violation(lp, out.x);
  for (double v : out.x) out.min_value = std::min(out.min_value, v);
  return out;
}

}  // namespace dps
