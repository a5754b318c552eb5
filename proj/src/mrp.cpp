#include "dps/mrp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dps {

TransitionMatrix build_transition_enumerative(const ModelParams& params, const Policy& policy) {
  const std::size_t n = params.num_states();
  const double alpha = params.alpha();
  const int A = params.packet_bits();
  Matrix lambda(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = policy.row(i);
    for (std::size_t m = 0; m < row.size(); ++m) {
      const double f = row[m];
      if (f == 0.0) continue;
      const auto rest = static_cast<int>(i) - static_cast<int>(m);
      lambda(static_cast<std::size_t>(rest), i) += (1.0 - alpha) * f;
      lambda(static_cast<std::size_t>(rest + A), i) += alpha * f;
    }
  }
  return {std::move(lambda)};
}

TransitionMatrix build_transition_piecewise(const ModelParams& params, const Policy& policy) {
  const int K = params.max_state();
  const int A = params.packet_bits();
  const int M = params.max_bits();
  const double alpha = params.alpha();
  const auto f = [&](int k, int m) -> double {
    if (m < 0 || m > M) return 0.0;
    return policy(static_cast<std::size_t>(k), static_cast<std::size_t>(m));
  };

  Matrix lambda(params.num_states(), params.num_states());
  for (int i = 0; i <= K; ++i) {
    for (int j = 0; j <= K; ++j) {
      const int d = i - j;
      double v = 0.0;
      if (M - A < d && d <= M) {
        v = (1.0 - alpha) * f(i, d);
      } else if (0 <= d && d <= M - A && j < A) {
        v = (1.0 - alpha) * f(i, d);
      } else if (0 <= d && d <= M - A && A <= j && j <= K - A) {
        v = (1.0 - alpha) * f(i, d) + alpha * f(i, d + A);
      } else if (0 <= d && d <= M - A && j > K - A) {
        v = alpha * f(i, d + A);
      } else if (-A <= d && d < 0 && j >= A) {
        v = alpha * f(i, d + A);
      }
      lambda(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
    }
  }
  return {std::move(lambda)};
}

Matrix stationary_system(const TransitionMatrix& t) {
  const std::size_t n = t.num_states();
  Matrix h(n, n);
  for (std::size_t c = 0; c < n; ++c) h(0, c) = 1.0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      h(r, c) = t.lambda(r - 1, c) - (r - 1 == c ? 1.0 : 0.0);
    }
  }
  return h;
}

namespace {

constexpr double kNegativeClamp = 1e-12;
constexpr double kResidualTolerance = 1e-10;

LuDecomposition factor_system(const TransitionMatrix& t) {
  auto lu = LuDecomposition::factor(stationary_system(t), kPivotTolerance);
  if (!lu) {
    throw Error(ErrorCode::SingularChain, "stationary system is singular (more than one recurrent class)");
  }
  return std::move(*lu);
}

StationaryDistribution clean_distribution(const TransitionMatrix& t, std::vector<double> pi) {
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] < -kNegativeClamp) {
      std::ostringstream os;
      os << "stationary probability of state " << k << " is " << pi[k];
      throw Error(ErrorCode::NumericalFailure, os.str());
    }
    if (pi[k] < 0.0) pi[k] = 0.0;
  }
  const double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& p : pi) p /= sum;

  const auto next = t.lambda.multiply(pi);
  const double residual = max_abs_diff(next, pi);
  if (residual > kResidualTolerance) {
    std::ostringstream os;
    os << "stationarity residual " << residual << " exceeds " << kResidualTolerance;
    throw Error(ErrorCode::NumericalFailure, os.str());
  }
  return {std::move(pi)};
}

std::vector<double> unit(std::size_t n, std::size_t i) {
  std::vector<double> e(n, 0.0);
  e[i] = 1.0;
  return e;
}

}  // namespace

StationaryDistribution stationary_distribution(const TransitionMatrix& t) {
  const auto lu = factor_system(t);
  return clean_distribution(t, lu.solve(unit(t.num_states(), 0)));
}

double average_power(const ModelParams& params, const Policy& policy, const StationaryDistribution& pi) {
  return dot(policy.power_per_state(params), pi.pi);
}

double average_delay(const ModelParams& params, const StationaryDistribution& pi) {
  double mean_backlog = 0.0;
  for (std::size_t k = 0; k < pi.pi.size(); ++k) mean_backlog += static_cast<double>(k) * pi.pi[k];
  const double d = mean_backlog / params.arrival_rate() - 1.0;
  return (d < 0.0 && d >= -1e-10) ? 0.0 : d;
}

ChainSolution solve_chain(const ModelParams& params, const Policy& policy) {
  const auto t = build_transition_enumerative(params, policy);
  const auto lu = factor_system(t);
  ChainSolution out;
  out.h_inverse = lu.inverse();
  out.stationary = clean_distribution(t, out.h_inverse.column(0));
  out.power_per_state = policy.power_per_state(params);
  out.point.power = dot(out.power_per_state, out.stationary.pi);
  out.point.delay = average_delay(params, out.stationary);
  return out;
}

DelayPowerPoint evaluate(const ModelParams& params, const Policy& policy) {
  const auto t = build_transition_enumerative(params, policy);
  const auto pi = stationary_distribution(t);
  return {average_power(params, policy, pi), average_delay(params, pi)};
}

std::vector<std::size_t> differing_rows(const Policy& f, const Policy& f2) {
  if (f.num_states() != f2.num_states() || f.num_actions() != f2.num_actions()) {
    throw Error(ErrorCode::InvalidPolicy, "policies have different shapes");
  }
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < f.num_states(); ++k) {
    const auto a = f.row(k);
    const auto b = f2.row(k);
    if (!std::equal(a.begin(), a.end(), b.begin())) rows.push_back(k);
  }
  return rows;
}

namespace {

std::size_t single_differing_row(const Policy& f, const Policy& f2) {
  const auto rows = differing_rows(f, f2);
  if (rows.size() != 1) {
    throw Error(ErrorCode::RowDiffCountMismatch,
                "policies differ in " + std::to_string(rows.size()) + " rows, expected exactly 1");
  }
  return rows.front();
}

}  // namespace

Policy mix_policies(const ModelParams& params, const Policy& f, const Policy& f2, double epsilon, MixMode mode) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "mixing weight must be in [0, 1]");
  }
  if (mode == MixMode::OneRow) {
    single_differing_row(f, f2);
  } else {
    differing_rows(f, f2);  // shape check
  }
  if (epsilon == 0.0) return f;
  if (epsilon == 1.0) return f2;
  Matrix mixed(f.num_states(), f.num_actions());
  for (std::size_t k = 0; k < f.num_states(); ++k)
    for (std::size_t m = 0; m < f.num_actions(); ++m) mixed(k, m) = (1.0 - epsilon) * f(k, m) + epsilon * f2(k, m);
  return Policy::from_matrix(params, std::move(mixed));
}

double MixingAnalysis::epsilon_prime(double epsilon) const {
  return (epsilon + epsilon * gain) / (1.0 + epsilon * gain);
}

DelayPowerPoint MixingAnalysis::predict(double epsilon) const {
  const double w = epsilon_prime(epsilon);
  return {(1.0 - w) * base.power + w * other.power, (1.0 - w) * base.delay + w * other.delay};
}

namespace {

MixingAnalysis analyse(const ModelParams& params, const Policy& f, const Policy& f2, const ChainSolution& base) {
  const std::size_t k = single_differing_row(f, f2);
  const auto other = evaluate(params, f2);

  // Only column k of Lambda changes, and row K of G is not part of H.
  const auto h_base = stationary_system(build_transition_enumerative(params, f));
  const auto h_other = stationary_system(build_transition_enumerative(params, f2));

  MixingAnalysis out;
  out.row = k;
  out.delta.resize(params.num_states());
  for (std::size_t r = 0; r < params.num_states(); ++r) out.delta[r] = h_other(r, k) - h_base(r, k);
  out.zeta = f2.power_per_state(params)[k] - base.power_per_state[k];
  const auto h_row = base.h_inverse.row(k);
  out.h_row.assign(h_row.begin(), h_row.end());
  out.gain = dot(out.h_row, out.delta);
  out.base = base.point;
  out.other = other;
  return out;
}

}  // namespace

MixingAnalysis mixing_analysis(const ModelParams& params, const Policy& f, const Policy& f2) {
  single_differing_row(f, f2);
  return analyse(params, f, f2, solve_chain(params, f));
}

SegmentSlope segment_slope(const ModelParams& params, const Policy& f, const Policy& f2) {
  if (differing_rows(f, f2).empty()) {
    throw Error(ErrorCode::DegenerateSegment, "identical policies span no segment");
  }
  single_differing_row(f, f2);
  const auto base = solve_chain(params, f);
  const auto analysis = analyse(params, f, f2, base);
  const double dp = analysis.other.power - analysis.base.power;
  if (std::abs(dp) < 1e-12) {
    throw Error(ErrorCode::DegenerateSegment, "segment has no extent in power; slope undefined");
  }

  const auto h_delta = base.h_inverse.multiply(analysis.delta);
  double d_term = 0.0;
  for (std::size_t k = 0; k < h_delta.size(); ++k) d_term += static_cast<double>(k) * h_delta[k];
  const double p_term = dot(base.power_per_state, h_delta);

  SegmentSlope out;
  out.closed_form = d_term / (params.arrival_rate() * (p_term - analysis.zeta));
  out.finite_difference = (analysis.other.delay - analysis.base.delay) / dp;
  return out;
}

}  // namespace dps
