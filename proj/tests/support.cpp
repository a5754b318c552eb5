#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dps::testing {

ModelParams reference_params() { return make_params(0.4, 2, 3, 5, {0, 1, 4, 9}); }

ModelParams make_params(double alpha, int A, int M, int Q, std::vector<double> power) {
  return validate_params(RawParams{alpha, A, M, Q, std::move(power)});
}

Matrix oracle_transition(const ModelParams& params, const Policy& policy) {
  const int K = params.max_state();
  const int A = params.packet_bits();
  Matrix lambda(params.num_states(), params.num_states());
  for (int i = 0; i <= K; ++i) {
    for (int m = 0; m <= params.max_bits(); ++m) {
      const double f = policy(static_cast<std::size_t>(i), static_cast<std::size_t>(m));
      if (f == 0.0) continue;
      const int q = i - m;
      lambda(static_cast<std::size_t>(q + A), static_cast<std::size_t>(i)) += params.alpha() * f;
      lambda(static_cast<std::size_t>(q), static_cast<std::size_t>(i)) += (1.0 - params.alpha()) * f;
    }
  }
  return lambda;
}

std::vector<double> oracle_stationary(const Matrix& lambda) {
  const std::size_t n = lambda.rows();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < 2'000'000; ++iter) {
    std::vector<double> next = lambda.multiply(pi);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = 0.5 * (next[i] + pi[i]);
      change = std::max(change, std::abs(next[i] - pi[i]));
    }
    pi = std::move(next);
    if (change < 1e-17) break;
  }
  double total = 0.0;
  for (double v : pi) total += v;
  for (double& v : pi) v /= total;
  return pi;
}

DelayPowerPoint oracle_evaluate(const ModelParams& params, const Policy& policy) {
  const auto pi = oracle_stationary(oracle_transition(params, policy));
  DelayPowerPoint out;
  double queue = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    for (std::size_t m = 0; m < policy.num_actions(); ++m) out.power += pi[k] * policy(k, m) * params.power(static_cast<int>(m));
    queue += static_cast<double>(k) * pi[k];
  }
  out.delay = queue / params.arrival_rate() - 1.0;
  return out;
}

namespace {

void recurse(const ModelParams& params, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  const int k = static_cast<int>(current.size());
  if (k > params.max_state()) {
    out.push_back(current);
    return;
  }
  for (int m = 0; m <= params.max_bits(); ++m) {
    if (m > k || k - m > params.buffer_bits()) continue;
    current.push_back(m);
    recurse(params, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> oracle_action_maps(const ModelParams& params) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  recurse(params, current, out);
  return out;
}

double oracle_hull_violation(const std::vector<DelayPowerPoint>& cloud, const std::vector<DelayPowerPoint>& vertices) {
  double worst = 0.0;
  const double p_min = vertices.back().power;
  for (const auto& c : cloud) {
    if (!std::isfinite(c.power)) continue;
    if (c.power < p_min) {
      worst = std::max(worst, p_min - c.power);
      continue;
    }
    double bound = vertices.front().delay;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
      const auto& hi = vertices[i];
      const auto& lo = vertices[i + 1];
      if (c.power <= hi.power && c.power >= lo.power) {
        const double t = (hi.power - c.power) / (hi.power - lo.power);
        bound = hi.delay + t * (lo.delay - hi.delay);
        break;
      }
    }
    if (vertices.size() == 1 && c.power < vertices.front().power) bound = vertices.front().delay;
    worst = std::max(worst, bound - c.delay);
  }
  return worst;
}

double distance_to_cloud(const DelayPowerPoint& p, const std::vector<DelayPowerPoint>& cloud) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cloud) {
    best = std::min(best, std::max(std::abs(c.power - p.power), std::abs(c.delay - p.delay)));
  }
  return best;
}

}  // namespace dps::testing
