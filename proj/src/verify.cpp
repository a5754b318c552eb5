#include "dps/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dps/lp.hpp"
#include "dps/mrp.hpp"
#include "dps/pareto.hpp"
#include "dps/sim.hpp"

namespace dps {

std::vector<double> random_row(const ModelParams& params, int k, Rng& rng, double deterministic_share) {
  std::vector<double> row(params.num_actions(), 0.0);
  const int lo = params.min_action(k);
  const int hi = params.max_action(k);
  if (lo == hi || rng.bernoulli(deterministic_share)) {
    row[static_cast<std::size_t>(rng.uniform_int(lo, hi))] = 1.0;
    return row;
  }
  double total = 0.0;
  for (int m = lo; m <= hi; ++m) {
    // Exponential weights give a uniform point on the simplex.
    const double w = -std::log(1.0 - rng.uniform());
    row[static_cast<std::size_t>(m)] = w;
    total += w;
  }
  for (double& v : row) v /= total;
  return row;
}

Policy random_policy(const ModelParams& params, Rng& rng, double deterministic_share) {
  Matrix f(params.num_states(), params.num_actions());
  for (int k = 0; k <= params.max_state(); ++k) {
    const auto row = random_row(params, k, rng, deterministic_share);
    std::copy(row.begin(), row.end(), f.row(static_cast<std::size_t>(k)).begin());
  }
  return Policy::from_matrix(params, std::move(f));
}

std::optional<std::pair<Policy, Policy>> random_one_row_pair(const ModelParams& params, Rng& rng, int attempts) {
  std::vector<int> choice_states;
  for (int k = 0; k <= params.max_state(); ++k)
    if (params.max_action(k) > params.min_action(k)) choice_states.push_back(k);
  if (choice_states.empty()) return std::nullopt;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    auto f = random_policy(params, rng);
    const int k = choice_states[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(choice_states.size()) - 1))];
    Matrix m2 = f.matrix();
    const auto row = random_row(params, k, rng);
    std::copy(row.begin(), row.end(), m2.row(static_cast<std::size_t>(k)).begin());
    auto f2 = Policy::from_matrix(params, std::move(m2));
    if (differing_rows(f, f2).size() != 1) continue;
    try {
      const auto a = solve_chain(params, f);
      const auto b = evaluate(params, f2);
      if (a.stationary.pi[static_cast<std::size_t>(k)] < 1e-6) continue;
      if (std::abs(a.point.power - b.power) < 1e-6) continue;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularChain) throw;
      continue;
    }
    return std::pair{std::move(f), std::move(f2)};
  }
  return std::nullopt;
}

ModelParams random_params(Rng& rng, std::uint64_t max_policies) {
  for (;;) {
    RawParams r;
    r.alpha = 0.1 + 0.8 * rng.uniform();
    r.packet_bits = rng.uniform_int(1, 3);
    r.max_bits = r.packet_bits + rng.uniform_int(0, 2);
    r.buffer_bits = rng.uniform_int(0, 6);
    double per_bit = 0.5 + rng.uniform();
    r.power.push_back(0.0);
    for (int m = 1; m <= r.max_bits; ++m) {
      r.power.push_back(per_bit * m);
      per_bit *= 1.1 + 0.9 * rng.uniform();
    }
    auto params = validate_params(r);
    const auto count = DeterministicPolicySpace::count(params);
    if (count && *count <= max_policies) return params;
  }
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult make(std::string name, double worst, double tolerance, std::string detail = {}) {
  return {std::move(name), worst <= tolerance, worst, tolerance, std::move(detail)};
}

double distance_to_line(const DelayPowerPoint& a, const DelayPowerPoint& b, const DelayPowerPoint& p) {
  const double dx = b.power - a.power;
  const double dy = b.delay - a.delay;
  return std::abs(dx * (p.delay - a.delay) - dy * (p.power - a.power)) / std::hypot(dx, dy);
}

CheckResult check_transition_builders(const ModelParams& params, Rng& rng, int trials) {
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const auto f = random_policy(params, rng);
    worst = std::max(worst, max_abs_diff(build_transition_enumerative(params, f).lambda,
                                         build_transition_piecewise(params, f).lambda));
  }
  return make("transition builders agree", worst, 1e-15, std::to_string(trials) + " random policies");
}

std::vector<CheckResult> check_mixing(const ModelParams& params, Rng& rng, int trials, double tol) {
  double collinear = 0.0;
  double endpoint = 0.0;
  double drop = 0.0;  // largest decrease of epsilon' between grid points
  double slope_err = 0.0;
  int pairs = 0;
  for (int i = 0; i < trials; ++i) {
    const auto pair = random_one_row_pair(params, rng);
    if (!pair) break;
    ++pairs;
    const auto& [f, f2] = *pair;
    const auto analysis = mixing_analysis(params, f, f2);
    for (int g = 0; g <= 10; ++g) {
      const double eps = g / 10.0;
      const auto direct = evaluate(params, mix_policies(params, f, f2, eps, MixMode::OneRow));
      const auto predicted = analysis.predict(eps);
      collinear = std::max({collinear, distance_to_line(analysis.base, analysis.other, direct),
                            std::abs(direct.power - predicted.power), std::abs(direct.delay - predicted.delay)});
    }
    endpoint = std::max({endpoint, std::abs(analysis.epsilon_prime(0.0)), std::abs(analysis.epsilon_prime(1.0) - 1.0)});
    double prev = analysis.epsilon_prime(0.0);
    for (int g = 1; g <= 1000; ++g) {
      const double cur = analysis.epsilon_prime(g / 1000.0);
      drop = std::max(drop, prev - cur);
      prev = cur;
    }
    const auto slope = segment_slope(params, f, f2);
    slope_err = std::max(slope_err, std::abs(slope.closed_form - slope.finite_difference) /
                                        std::max(1.0, std::abs(slope.closed_form)));
  }
  const std::string detail = std::to_string(pairs) + " one-row pairs";
  std::vector<CheckResult> out;
  out.push_back(make("mixing points collinear", collinear, tol, detail + ", 11-point grid"));
  out.push_back(make("epsilon' endpoints exact", endpoint, 0.0, detail));
  out.push_back(make("epsilon' nondecreasing", drop, 0.0, detail + ", 1000-point grid"));
  out.push_back(make("closed-form slope", slope_err, tol, detail));
  if (pairs < trials) {
    for (auto& c : out) {
      c.passed = false;
      c.detail += " (could not generate enough pairs)";
    }
  }
  return out;
}

std::vector<CheckResult> check_frontiers(const ModelParams& params, int budgets) {
  std::vector<CheckResult> out;
  const auto curve = algorithm1(params);

  bool structure_ok = true;
  for (const auto& v : curve.vertices()) {
    if (!v.policy.is_deterministic() || !is_threshold(params, v.policy)) structure_ok = false;
  }
  out.push_back({"vertices deterministic threshold", structure_ok, 0.0, 0.0,
                 std::to_string(curve.size()) + " vertices"});

  try {
    const auto brute = brute_force_frontier(params);
    double worst = 0.0;
    std::string detail = std::to_string(brute.cloud.size()) + " deterministic policies, " +
                         std::to_string(brute.singular_count) + " singular";
    if (brute.curve.size() != curve.size()) {
      worst = std::numeric_limits<double>::infinity();
      detail += ", vertex counts " + std::to_string(curve.size()) + " vs " + std::to_string(brute.curve.size());
    } else {
      for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& a = curve.vertices()[i].point;
        const auto& b = brute.curve.vertices()[i].point;
        worst = std::max({worst, std::abs(a.power - b.power), std::abs(a.delay - b.delay)});
      }
    }
    out.push_back(make("frontier walk matches brute force", worst, 1e-9, detail));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EnumerationTooLarge) throw;
    out.push_back({"frontier walk matches brute force", true, 0.0, 1e-9, "skipped: enumeration too large"});
  }

  std::vector<double> grid;
  for (int i = 0; i < budgets; ++i) {
    const double t = budgets == 1 ? 1.0 : static_cast<double>(i) / (budgets - 1);
    grid.push_back(curve.min_power() + t * (curve.max_power() - curve.min_power()));
  }
  const auto results = sweep(params, grid);
  double overlap = 0.0;
  double residual = 0.0;
  double certificate = 0.0;
  int infeasible = 0;
  for (const auto& r : results) {
    const auto& s = r.solution;
    if (s.status != LpStatus::Optimal) {
      ++infeasible;
      continue;
    }
    overlap = std::max(overlap, std::abs(s.delay - *curve.delay_at(r.budget)));
    residual = std::max({residual, s.max_equilibrium_residual, s.normalization_residual, s.budget_excess,
                         -s.min_value});
    certificate = std::max(certificate, -s.min_reduced_cost);
  }
  if (infeasible > 0) overlap = std::numeric_limits<double>::infinity();
  out.push_back(make("LP sweep overlaps curve", overlap, 1e-6,
                     std::to_string(budgets) + " budgets, " + std::to_string(infeasible) + " not optimal"));
  out.push_back(make("LP feasibility residuals", residual, 1e-9));
  out.push_back(make("LP reduced-cost certificate", certificate, 1e-9));
  return out;
}

CheckResult check_occupation(const ModelParams& params, Rng& rng, int trials) {
  const auto lp = build_lp(params, std::numeric_limits<double>::infinity());
  double worst = 0.0;
  int used = 0;
  for (int i = 0; i < trials * 10 && used < trials; ++i) {
    const auto f = random_policy(params, rng);
    StationaryDistribution pi;
    try {
      pi = stationary_distribution(build_transition_enumerative(params, f));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularChain) throw;
      continue;
    }
    ++used;
    for (double r : equilibrium_residuals(lp, occupation_measure(lp, f, pi))) worst = std::max(worst, std::abs(r));
  }
  return make("occupation measures balance", worst, 1e-12, std::to_string(used) + " random policies");
}

CheckResult check_simulation(const ModelParams& params, Rng& rng, int policies, std::uint64_t slots) {
  double worst_rel = 0.0;
  double worst_tv = 0.0;
  int used = 0;
  for (int i = 0; i < policies * 10 && used < policies; ++i) {
    const auto f = random_policy(params, rng);
    ChainSolution chain;
    try {
      chain = solve_chain(params, f);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularChain) throw;
      continue;
    }
    ++used;
    const auto sim = simulate(params, f, slots, 1000 + static_cast<std::uint64_t>(i));
    // Error as a fraction of its allowance: 2% relative, or 0.01 absolute
    // for delays below 0.05.
    const double power_err = std::abs(sim.empirical_power - chain.point.power) / (0.02 * chain.point.power);
    const double delay_allowance = chain.point.delay < 0.05 ? 0.01 : 0.02 * chain.point.delay;
    const double delay_err = std::abs(sim.empirical_delay - chain.point.delay) / delay_allowance;
    worst_rel = std::max({worst_rel, power_err, delay_err});
    double tv = 0.0;
    for (std::size_t k = 0; k < sim.state_occupancy.size(); ++k)
      tv += std::abs(sim.state_occupancy[k] - chain.stationary.pi[k]);
    worst_tv = std::max(worst_tv, tv / 2.0);
    if (sim.overflow_violations + sim.underflow_violations > 0) worst_rel = std::numeric_limits<double>::infinity();
  }
  auto result = make("simulation agrees with analysis", worst_rel, 1.0,
                     std::to_string(used) + " policies x " + std::to_string(slots) + " slots, TV " + fmt(worst_tv));
  if (worst_tv > 0.01) result.passed = false;
  return result;
}

}  // namespace

std::vector<CheckResult> run_verification(const ModelParams& params, const VerifyOptions& options) {
  Rng rng(options.seed);
  std::vector<CheckResult> out;
  out.push_back(check_transition_builders(params, rng, options.trials));
  for (auto& c : check_mixing(params, rng, options.trials, options.tolerance)) out.push_back(std::move(c));
  for (auto& c : check_frontiers(params, options.lp_budgets)) out.push_back(std::move(c));
  out.push_back(check_occupation(params, rng, options.trials));
  out.push_back(check_simulation(params, rng, options.sim_policies, options.sim_slots));
  return out;
}

}  // namespace dps
