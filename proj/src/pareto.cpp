#include "dps/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "dps/parallel.hpp"

namespace dps {

std::vector<DelayPowerPoint> ParetoCurve::points() const {
  std::vector<DelayPowerPoint> out;
  out.reserve(vertices_.size());
  for (const auto& v : vertices_) out.push_back(v.point);
  return out;
}

std::vector<CurveSegment> ParetoCurve::segments() const {
  std::vector<CurveSegment> out;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const auto& a = vertices_[i].point;
    const auto& b = vertices_[i + 1].point;
    out.push_back({a, b, (b.delay - a.delay) / (a.power - b.power)});
  }
  return out;
}

std::optional<double> ParetoCurve::delay_at(double power) const {
  if (vertices_.empty() || power < min_power()) return std::nullopt;
  if (power >= max_power()) return vertices_.front().point.delay;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const auto& hi = vertices_[i].point;
    const auto& lo = vertices_[i + 1].point;
    if (power >= lo.power) {
      const double t = (power - lo.power) / (hi.power - lo.power);
      return lo.delay + t * (hi.delay - lo.delay);
    }
  }
  return vertices_.back().point.delay;
}

namespace {

// Cross product of (a - o) and (b - o), scaled by both lengths so the test
// does not depend on how far apart the points are.
double turn(const DelayPowerPoint& o, const DelayPowerPoint& a, const DelayPowerPoint& b) {
  const double ax = a.power - o.power;
  const double ay = a.delay - o.delay;
  const double bx = b.power - o.power;
  const double by = b.delay - o.delay;
  return (ax * by - ay * bx) / (std::hypot(ax, ay) * std::hypot(bx, by));
}

bool close(double a, double b) { return std::abs(a - b) <= kHullTolerance * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<std::size_t> lower_convex_hull(std::span<const DelayPowerPoint> points) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::isfinite(points[i].power) && std::isfinite(points[i].delay)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].power != points[b].power) return points[a].power < points[b].power;
    return points[a].delay < points[b].delay;
  });

  // Pareto staircase: power rising, delay strictly falling. Powers that
  // differ only by rounding count as equal.
  std::vector<std::size_t> stair;
  for (std::size_t i : order) {
    while (!stair.empty() && close(points[i].power, points[stair.back()].power) &&
           points[i].delay < points[stair.back()].delay && !close(points[i].delay, points[stair.back()].delay)) {
      stair.pop_back();
    }
    if (!stair.empty() && (points[i].delay >= points[stair.back()].delay || close(points[i].delay, points[stair.back()].delay))) {
      continue;
    }
    stair.push_back(i);
  }

  // Convex part of the staircase, left to right in power.
  std::vector<std::size_t> hull;
  for (std::size_t i : stair) {
    while (hull.size() >= 2 && turn(points[hull[hull.size() - 2]], points[hull.back()], points[i]) <= kHullTolerance) {
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::reverse(hull.begin(), hull.end());
  return hull;
}

namespace {

constexpr double kMoveTolerance = 1e-12;

bool same_slope(double a, double b) {
  if (!std::isfinite(b)) return false;
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

std::string describe(const ThresholdPolicy& tp) {
  std::ostringstream os;
  os << "thresholds (";
  for (std::size_t i = 0; i < tp.thresholds.size(); ++i) os << (i ? "," : "") << tp.thresholds[i];
  os << ")";
  return os.str();
}

class ThresholdEvaluator {
 public:
  explicit ThresholdEvaluator(const ModelParams& params) : params_(params) {}

  DelayPowerPoint operator()(const ThresholdPolicy& tp) {
    if (const auto it = cache_.find(tp.thresholds); it != cache_.end()) return it->second;
    DelayPowerPoint point;
    try {
      point = evaluate(params_, threshold_to_policy(params_, tp));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularChain) throw;
      throw Error(ErrorCode::SingularChain, describe(tp) + ": " + e.what());
    }
    cache_.emplace(tp.thresholds, point);
    return point;
  }

 private:
  const ModelParams& params_;
  std::map<std::vector<int>, DelayPowerPoint> cache_;
};

struct Candidate {
  ThresholdPolicy tp;
  DelayPowerPoint point;
};

bool same_point(const DelayPowerPoint& a, const DelayPowerPoint& b) {
  return std::abs(a.power - b.power) <= kMoveTolerance && std::abs(a.delay - b.delay) <= kMoveTolerance;
}

// Unit increments plus the moves that raise k_m while k_m == k_{m+1} == ...,
// which drag the equal thresholds along. Each of these changes the action of
// exactly one state.
std::vector<ThresholdPolicy> walk_moves(const ModelParams& params, const ThresholdPolicy& tp) {
  auto out = neighbors_increase_threshold(params, tp);
  const auto base = complete_thresholds(params, tp);
  const int K = params.max_state();
  for (std::size_t m = 1; m + 1 < base.thresholds.size(); ++m) {
    if (base.thresholds[m] != base.thresholds[m + 1] || base.thresholds[m] >= K) continue;
    ThresholdPolicy next = base;
    for (std::size_t j = m; j < next.thresholds.size() && next.thresholds[j] == base.thresholds[m]; ++j) ++next.thresholds[j];
    try {
      next = complete_thresholds(params, next);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleThresholds) throw;
      continue;
    }
    out.push_back(std::move(next));
  }
  return out;
}

// Adds every threshold vector reachable from `set` by increments that leave
// the reward pair unchanged (they only touch states the chain never visits).
std::vector<Candidate> with_neutral_moves(const ModelParams& params, ThresholdEvaluator& eval, std::vector<Candidate> set) {
  std::map<std::vector<int>, bool> seen;
  for (const auto& c : set) seen.emplace(c.tp.thresholds, true);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (auto& next : walk_moves(params, set[i].tp)) {
      if (seen.contains(next.thresholds)) continue;
      const auto point = eval(next);
      if (!same_point(point, set[i].point)) continue;
      seen.emplace(next.thresholds, true);
      set.push_back({std::move(next), point});
    }
  }
  return set;
}

}  // namespace

ParetoCurve algorithm1(const ModelParams& params) {
  ThresholdEvaluator eval(params);

  Candidate start{initial_threshold_policy(params), {}};
  start.point = eval(start.tp);
  std::vector<Candidate> walk{start};
  std::vector<Candidate> current{start};
  DelayPowerPoint here = start.point;

  while (!current.empty()) {
    const std::vector<Candidate> parents = with_neutral_moves(params, eval, std::move(current));
    const DelayPowerPoint prev = here;
    current.clear();
    double best_slope = std::numeric_limits<double>::infinity();

    std::map<std::vector<int>, bool> seen;
    for (const auto& parent : parents) {
      for (auto& next : walk_moves(params, parent.tp)) {
        if (!seen.emplace(next.thresholds, true).second) continue;
        const auto point = eval(next);
        if (!(point.delay >= prev.delay - kMoveTolerance && point.power < prev.power - kMoveTolerance)) continue;
        const double slope = std::max(0.0, point.delay - prev.delay) / (prev.power - point.power);
        if (same_slope(slope, best_slope)) {
          current.push_back({std::move(next), point});
        } else if (slope < best_slope) {
          best_slope = slope;
          current.assign(1, {std::move(next), point});
        }
      }
    }
    if (current.empty()) break;

    // The tie set may hold several points on the same line; the farthest
    // one (lowest power) is where the walk continues from.
    const auto rep = std::min_element(current.begin(), current.end(), [](const Candidate& a, const Candidate& b) {
      if (a.point.power != b.point.power) return a.point.power < b.point.power;
      if (a.point.delay != b.point.delay) return a.point.delay < b.point.delay;
      return a.tp.thresholds < b.tp.thresholds;
    });
    here = rep->point;
    walk.push_back(*rep);
  }

  std::vector<DelayPowerPoint> points;
  for (const auto& c : walk) points.push_back(c.point);
  std::vector<CurveVertex> vertices;
  for (std::size_t i : lower_convex_hull(points)) {
    vertices.push_back({walk[i].point, threshold_to_policy(params, walk[i].tp), complete_thresholds(params, walk[i].tp)});
  }
  return ParetoCurve(std::move(vertices));
}

BruteForceResult brute_force_frontier(const ModelParams& params, std::uint64_t cap) {
  const DeterministicPolicySpace space(params, cap);
  const auto n = static_cast<std::size_t>(space.size());

  BruteForceResult out;
  out.cloud.assign(n, DelayPowerPoint{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
  std::vector<char> singular(n, 0);
  parallel_for(n, [&](std::size_t i) {
    try {
      out.cloud[i] = evaluate(params, space.policy(i));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularChain) throw;
      singular[i] = 1;
    }
  });

  std::vector<std::size_t> kept;
  std::vector<DelayPowerPoint> points;
  out.singular.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.singular[i] = singular[i] != 0;
    if (singular[i]) {
      ++out.singular_count;
      continue;
    }
    kept.push_back(i);
    points.push_back(out.cloud[i]);
  }

  // Among policies with identical points the enumeration order picks the
  // representative, since lower_convex_hull keeps the first duplicate.
  std::vector<CurveVertex> vertices;
  for (std::size_t h : lower_convex_hull(points)) {
    const std::size_t index = kept[h];
    auto policy = space.policy(index);
    auto thresholds = is_threshold(params, policy);
    vertices.push_back({out.cloud[index], std::move(policy), std::move(thresholds)});
  }
  out.curve = ParetoCurve(std::move(vertices));
  return out;
}

}  // namespace dps
