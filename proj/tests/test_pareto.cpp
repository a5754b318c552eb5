#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "dps/pareto.hpp"
#include "dps/verify.hpp"
#include "support.hpp"

namespace dps {
namespace {

using testing::distance_to_cloud;
using testing::make_params;
using testing::oracle_evaluate;
using testing::oracle_hull_violation;
using testing::reference_params;

std::vector<DelayPowerPoint> pts(std::initializer_list<std::pair<double, double>> list) {
  std::vector<DelayPowerPoint> out;
  for (auto [p, d] : list) out.push_back({p, d});
  return out;
}

TEST(Hull, SinglePoint) {
  const auto cloud = pts({{1, 1}});
  EXPECT_EQ(lower_convex_hull(cloud), (std::vector<std::size_t>{0}));
}

TEST(Hull, DominatingPoint) {
  const auto cloud = pts({{2, 3}, {1, 1}, {3, 2}, {1.5, 4}});
  EXPECT_EQ(lower_convex_hull(cloud), (std::vector<std::size_t>{1}));
}

TEST(Hull, DropsCollinearAndInteriorPoints) {
  // (3,0) (2,1) (1,2) collinear; (1.5,3) above; (0.5,5) is a vertex
  const auto cloud = pts({{1, 2}, {3, 0}, {1.5, 3}, {2, 1}, {0.5, 5}, {4, 0}});
  EXPECT_EQ(lower_convex_hull(cloud), (std::vector<std::size_t>{1, 0, 4}));
}

TEST(Hull, DuplicatesKeptOnce) {
  const auto cloud = pts({{2, 0}, {1, 1}, {2, 0}, {1, 1}});
  const auto hull = lower_convex_hull(cloud);
  ASSERT_EQ(hull.size(), 2u);
  EXPECT_EQ(cloud[hull[0]], (DelayPowerPoint{2, 0}));
  EXPECT_EQ(cloud[hull[1]], (DelayPowerPoint{1, 1}));
}

TEST(Hull, IgnoresNaN) {
  const double nan = std::nan("");
  std::vector<DelayPowerPoint> cloud;
  for (int i = 0; i < 30; ++i) cloud.push_back({nan, nan});
  cloud.push_back({2, 0});
  for (int i = 0; i < 30; ++i) cloud.push_back({nan, nan});
  cloud.push_back({1, 1});
  cloud.push_back({3, 0.5});
  for (int i = 0; i < 30; ++i) cloud.push_back({nan, nan});
  EXPECT_EQ(lower_convex_hull(cloud), (std::vector<std::size_t>{30, 61}));
}

TEST(Hull, RandomCloudsAgainstOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DelayPowerPoint> cloud;
    const int n = 1 + rng.uniform_int(0, 40);
    for (int i = 0; i < n; ++i) cloud.push_back({static_cast<double>(rng.uniform_int(0, 10)), static_cast<double>(rng.uniform_int(0, 10))});
    const auto idx = lower_convex_hull(cloud);
    ASSERT_FALSE(idx.empty());
    std::vector<DelayPowerPoint> hull;
    for (auto i : idx) hull.push_back(cloud[i]);
    EXPECT_LE(oracle_hull_violation(cloud, hull), 1e-12);
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
      EXPECT_GT(hull[i].power, hull[i + 1].power);
      EXPECT_LT(hull[i].delay, hull[i + 1].delay);
    }
    for (std::size_t i = 0; i + 2 < hull.size(); ++i) {
      const double s1 = (hull[i + 1].delay - hull[i].delay) / (hull[i].power - hull[i + 1].power);
      const double s2 = (hull[i + 2].delay - hull[i + 1].delay) / (hull[i + 1].power - hull[i + 2].power);
      EXPECT_LT(s1, s2);
    }
    // the max-power vertex has the least delay, ties broken by power
    for (const auto& c : cloud) {
      EXPECT_GE(c.delay, hull.front().delay);
      if (c.delay == hull.front().delay) EXPECT_GE(c.power, hull.front().power);
      EXPECT_GE(c.power, hull.back().power);
    }
  }
}

std::string describe(const ParetoCurve& c) {
  std::string out;
  for (const auto& v : c.vertices()) out += " (" + std::to_string(v.point.power) + ", " + std::to_string(v.point.delay) + ")";
  return out;
}

void expect_same_curve(const ParetoCurve& a, const ParetoCurve& b) {
  ASSERT_EQ(a.size(), b.size()) << describe(a) << " vs" << describe(b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.vertices()[i].point.power, b.vertices()[i].point.power, 1e-9);
    EXPECT_NEAR(a.vertices()[i].point.delay, b.vertices()[i].point.delay, 1e-9);
  }
}

TEST(FrontierWalk, ReferenceFirstVertex) {
  const auto curve = algorithm1(reference_params());
  ASSERT_GE(curve.size(), 2u);
  EXPECT_NEAR(curve.vertices()[0].point.power, 1.6, 1e-12);
  EXPECT_NEAR(curve.vertices()[0].point.delay, 0.0, 1e-12);
}

TEST(FrontierWalk, ReferenceMatchesBruteForce) {
  const auto p = reference_params();
  const auto walk = algorithm1(p);
  const auto brute = brute_force_frontier(p);
  EXPECT_EQ(brute.cloud.size(), 2304u);
  expect_same_curve(walk, brute.curve);

  std::vector<DelayPowerPoint> finite;
  for (std::size_t i = 0; i < brute.cloud.size(); ++i)
    if (!brute.singular[i]) finite.push_back(brute.cloud[i]);
  EXPECT_LE(oracle_hull_violation(finite, walk.points()), 1e-12);
  for (const auto& v : walk.vertices()) EXPECT_LE(distance_to_cloud(v.point, finite), 1e-12);
}

TEST(FrontierWalk, VerticesAreDeterministicThresholdPolicies) {
  const auto p = reference_params();
  const auto curve = algorithm1(p);
  for (const auto& v : curve.vertices()) {
    EXPECT_TRUE(v.policy.is_deterministic());
    ASSERT_TRUE(v.thresholds.has_value());
    EXPECT_TRUE(is_threshold(p, v.policy).has_value());
    const auto o = oracle_evaluate(p, v.policy);
    EXPECT_NEAR(o.power, v.point.power, 1e-10);
    EXPECT_NEAR(o.delay, v.point.delay, 1e-10);
  }
}

TEST(FrontierWalk, CurveShape) {
  const auto curve = algorithm1(reference_params());
  const auto segs = curve.segments();
  ASSERT_EQ(segs.size(), curve.size() - 1);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_GT(segs[i].from.power, segs[i].to.power);
    EXPECT_GE(segs[i].slope, 0.0);
    if (i > 0) EXPECT_GT(segs[i].slope, segs[i - 1].slope);
  }
}

TEST(FrontierWalk, ZeroBufferSingleVertex) {
  const auto p = make_params(0.3, 2, 2, 0, {0, 1, 3});
  const auto curve = algorithm1(p);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_NEAR(curve.vertices()[0].point.delay, 0.0, 1e-12);
  EXPECT_NEAR(curve.vertices()[0].point.power, 0.9, 1e-12);
}

// Some reachable state of `policy` sends more than A bits.
bool sends_more_than_a(const ModelParams& p, const Policy& policy) {
  const auto lambda = testing::oracle_transition(p, policy);
  std::vector<bool> seen(p.num_states(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < p.num_states(); ++j) {
      if (lambda(j, i) > 0.0 && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  const auto acts = policy.actions();
  for (std::size_t k = 0; k < acts.size(); ++k) {
    if (seen[k] && acts[k] > p.packet_bits()) return true;
  }
  return false;
}

bool same_curve(const ParetoCurve& a, const ParetoCurve& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.vertices()[i].point.power - b.vertices()[i].point.power) > 1e-9) return false;
    if (std::abs(a.vertices()[i].point.delay - b.vertices()[i].point.delay) > 1e-9) return false;
  }
  return true;
}

// The walk only reaches vertices whose reachable states send at most A bits.
// Wherever the true frontier has no vertex beyond that, the two curves agree.
TEST(FrontierWalk, RandomInstancesMatchBruteForceUnlessFrontierExceedsA) {
  Rng rng(2024);
  int matched = 0;
  for (int set = 0; set < 100; ++set) {
    const auto p = random_params(rng, 100000);
    SCOPED_TRACE(::testing::Message() << "alpha=" << p.alpha() << " A=" << p.packet_bits() << " M=" << p.max_bits()
                                      << " Q=" << p.buffer_bits() << " P_M=" << p.power(p.max_bits()));
    const auto brute = brute_force_frontier(p);
    const auto walk = algorithm1(p);
    for (const auto& v : walk.vertices()) {
      EXPECT_GE(v.point.delay, *brute.curve.delay_at(v.point.power) - 1e-9);
    }
    if (same_curve(walk, brute.curve)) {
      ++matched;
      continue;
    }
    bool beyond_a = false;
    for (const auto& v : brute.curve.vertices()) beyond_a = beyond_a || sends_more_than_a(p, v.policy);
    EXPECT_TRUE(beyond_a) << "walk misses a vertex that sends at most A bits";
  }
  EXPECT_GE(matched, 90);
}

TEST(FrontierWalk, FrontierVertexSendingMoreThanA) {
  const auto p = make_params(0.5701546479318107, 3, 5, 4,
                             {0, 1.4630850257865768, 5.4309906801315497, 14.343170386538459, 23.202811041638277,
                              57.779210109297942});
  const std::vector<int> acts{0, 1, 1, 2, 4, 4, 4, 4};
  const auto policy = Policy::deterministic(p, acts);
  EXPECT_TRUE(sends_more_than_a(p, policy));
  const auto point = oracle_evaluate(p, policy);
  const auto walk = algorithm1(p);
  EXPECT_GT(*walk.delay_at(point.power), point.delay + 1e-3);
  EXPECT_NEAR(*brute_force_frontier(p).curve.delay_at(point.power), point.delay, 1e-9);
}

// The next vertex changes one state's action, which needs k_1 and k_2 raised
// together because they are equal.
TEST(FrontierWalk, CoupledThresholdMove) {
  const auto p = make_params(0.70266274243299276, 3, 3, 5, {0, 1.2030305666622758, 4.5301168388258501, 7.541584978777804});
  const auto walk = algorithm1(p);
  const auto brute = brute_force_frontier(p);
  EXPECT_TRUE(same_curve(walk, brute.curve));
  EXPECT_GE(walk.size(), 6u);
}

// The second vertex differs from the first in a state the first never
// visits, reached by a move that leaves (P, D) unchanged.
TEST(FrontierWalk, NeutralMoveThroughUnvisitedState) {
  const auto p = make_params(0.82820025810468334, 3, 3, 2, {0, 1.4145296526348572, 5.126338172995875, 8.5401478428680448});
  EXPECT_TRUE(same_curve(algorithm1(p), brute_force_frontier(p).curve));
}

TEST(Curve, DelayAt) {
  const auto curve = algorithm1(reference_params());
  EXPECT_FALSE(curve.delay_at(curve.min_power() - 1e-3).has_value());
  EXPECT_NEAR(*curve.delay_at(curve.max_power() + 1.0), 0.0, 1e-12);
  const auto& v = curve.vertices();
  const double mid = 0.5 * (v[1].point.power + v[2].point.power);
  EXPECT_NEAR(*curve.delay_at(mid), 0.5 * (v[1].point.delay + v[2].point.delay), 1e-12);
}

}  // namespace
}  // namespace dps
