#pragma once

// Optimal delay-power tradeoff: the lower-left convex boundary of the set
// of achievable (power, delay) pairs.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dps/model.hpp"
#include "dps/mrp.hpp"
#include "dps/policies.hpp"

namespace dps {

inline constexpr double kHullTolerance = 1e-12;

struct CurveVertex {
  DelayPowerPoint point;
  Policy policy;
  std::optional<ThresholdPolicy> thresholds;
};

struct CurveSegment {
  DelayPowerPoint from;  // higher-power end
  DelayPowerPoint to;
  double slope = 0.0;    // delay gained per unit of power saved
};

/// Vertices ordered by decreasing power (so increasing delay).
class ParetoCurve {
 public:
  ParetoCurve() = default;
  explicit ParetoCurve(std::vector<CurveVertex> vertices) : vertices_(std::move(vertices)) {}

  [[nodiscard]] const std::vector<CurveVertex>& vertices() const noexcept { return vertices_; }
  [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }
  [[nodiscard]] std::vector<DelayPowerPoint> points() const;
  [[nodiscard]] std::vector<CurveSegment> segments() const;

  [[nodiscard]] double min_power() const { return vertices_.back().point.power; }
  [[nodiscard]] double max_power() const { return vertices_.front().point.power; }

  /// Lowest delay achievable with average power at most `power`; nullopt
  /// below the minimum-power vertex.
  [[nodiscard]] std::optional<double> delay_at(double power) const;

 private:
  std::vector<CurveVertex> vertices_;
};

/// Indices of the Pareto-optimal lower-left convex hull vertices of
/// `points`, ordered by decreasing power. Collinear points (cross product
/// within kHullTolerance) are dropped.
std::vector<std::size_t> lower_convex_hull(std::span<const DelayPowerPoint> points);

/// Threshold walk from the zero-delay strategy towards lower power, taking
/// the smallest-slope legal one-step threshold increment each round.
ParetoCurve algorithm1(const ModelParams& params);

struct BruteForceResult {
  /// One entry per deterministic policy, by enumeration index. Singular
  /// chains are left out of the hull and flagged here.
  std::vector<DelayPowerPoint> cloud;
  std::vector<bool> singular;
  std::size_t singular_count = 0;
  ParetoCurve curve;
};

/// Evaluates every deterministic policy and returns the hull of the cloud.
BruteForceResult brute_force_frontier(const ModelParams& params, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace dps
