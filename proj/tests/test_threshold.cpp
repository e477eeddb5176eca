#include <cmath>

#include <gtest/gtest.h>

#include "qconcat/threshold.hpp"

using namespace qconcat;

namespace {

const Polynomial3 kX = Polynomial3::variable(0), kZ = Polynomial3::variable(2);

Polynomial3 cube(const Polynomial3& p) { return p * p * p; }

}  // namespace

TEST(FixedPoints, ShorZComponent) {
  const auto q = univariate(cube(kZ * Rational(3, 2) - cube(kZ) * Rational(1, 2)), 2);
  const auto r = fixed_points(q);
  ASSERT_TRUE(r.interior_unstable);
  EXPECT_NEAR(*r.interior_unstable, 0.730, 1e-3);
  // Endpoints 0 and 1 attract.
  ASSERT_GE(r.points.size(), 3u);
  EXPECT_EQ(r.points.front().value, 0.0);
  EXPECT_EQ(r.points.front().stability, Stability::Stable);
  EXPECT_EQ(r.points.back().value, 1.0);
  EXPECT_EQ(r.points.back().stability, Stability::Stable);
  EXPECT_NEAR(q.evaluate(*r.interior_unstable), *r.interior_unstable, 1e-13);
}

TEST(FixedPoints, ShorXComponent) {
  const auto q = univariate(cube(kX) * Rational(3, 2) - cube(cube(kX)) * Rational(1, 2), 0);
  const auto r = fixed_points(q);
  ASSERT_TRUE(r.interior_unstable);
  EXPECT_NEAR(*r.interior_unstable, 0.900, 1e-3);
  EXPECT_GT(std::abs(q.derivative().evaluate(*r.interior_unstable)), 1.0);
}

TEST(FixedPoints, DegenerateAndMarginal) {
  EXPECT_TRUE(fixed_points(univariate(kZ, 2)).degenerate);
  // x^2 has a superattracting 0 and a repelling 1; no interior point.
  const auto r = fixed_points(univariate(kX * kX, 0));
  EXPECT_FALSE(r.interior_unstable);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[1].stability, Stability::Unstable);
  // (3/2)z - (1/2)z^3 has slope 0 at 1 and slope 3/2 at 0.
  const auto b = fixed_points(univariate(kZ * Rational(3, 2) - cube(kZ) * Rational(1, 2), 2));
  EXPECT_EQ(b.points.front().stability, Stability::Unstable);
  EXPECT_EQ(b.points.back().stability, Stability::Stable);
}

TEST(IterateLimit, BelowAndAboveThreshold) {
  const auto shor = scheme_staged(builtin("shor"));
  EXPECT_EQ(iterate_limit(shor, 2, 0.30).limit, Limit::One);
  EXPECT_EQ(iterate_limit(shor, 2, 0.33).limit, Limit::Zero);
  EXPECT_EQ(iterate_limit(shor, 0, 0.10).limit, Limit::One);
  EXPECT_EQ(iterate_limit(shor, 0, 0.11).limit, Limit::Zero);
  const auto prime = scheme_staged(builtin("shor_prime"));
  EXPECT_TRUE(shows_period_two(prime));
  EXPECT_FALSE(shows_period_two(shor));
}

struct Row {
  const char* code;
  double tx, ty, tz, p_th;
  int period;
};

TEST(StorageThresholds, BuiltinCodes) {
  const Row rows[] = {{"shor", 0.1050, 0.1050, 0.3151, 0.0748, 1},
                      {"shor_prime", 0.1618, 0.1618, 0.2150, 0.1121, 2},
                      {"steane", 0.1383, 0.1383, 0.1383, 0.0969, 1},
                      {"five_bit", 0.2027, 0.2027, 0.2027, 0.1376, 1}};
  for (const auto& row : rows) {
    const auto r = storage_thresholds(scheme_staged(builtin(row.code)));
    EXPECT_NEAR(r.components[0].t_star, row.tx, 5e-4) << row.code;
    EXPECT_NEAR(r.components[1].t_star, row.ty, 5e-4) << row.code;
    EXPECT_NEAR(r.components[2].t_star, row.tz, 5e-4) << row.code;
    EXPECT_NEAR(r.p_th, row.p_th, 5e-4) << row.code;
    EXPECT_EQ(r.period, row.period) << row.code;
    // p* = ¾(1 - e^{-t*}) reproduces the tabulated value to 4 decimals.
    EXPECT_NEAR(threshold_probability(row.tz), 0.75 * (1 - std::exp(-row.tz)), 1e-15);
  }
  EXPECT_NEAR(threshold_probability(0.1050), 0.0748, 5e-5);
  EXPECT_NEAR(threshold_probability(0.2027), 0.1376, 5e-5);
}

TEST(StorageThresholds, ShorYIsTheSmallerOfXAndZ) {
  const auto r = storage_thresholds(scheme_staged(builtin("shor")));
  EXPECT_NEAR(r.components[1].t_star, std::min(r.components[0].t_star, r.components[2].t_star), 1e-8);
  EXPECT_EQ(r.components[2].method, "fixed point");
  EXPECT_EQ(r.components[1].method, "bisection");
}

// Fixed-point route against bisection of the iterated map.
TEST(StorageThresholds, FixedPointAgreesWithBisection) {
  const auto shor = scheme_staged(builtin("shor"));
  const auto r = storage_thresholds(shor);
  for (int c : {0, 2}) {
    ASSERT_EQ(r.components[c].method, "fixed point");
    EXPECT_NEAR(bisection_threshold(shor, c), r.components[c].t_star, 1e-6) << c;
  }
}

TEST(StorageThresholds, TrivialCodeIsDegenerate) {
  const auto r = storage_thresholds(scheme_staged(builtin("trivial")));
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.notes.empty());
}

TEST(StorageThresholds, CurvesCrossAtTheFixedPoint) {
  const auto profile = asymptotic_profile(scheme_staged(builtin("shor")), {0.3151}, 6);
  for (unsigned l = 1; l <= 6; ++l) EXPECT_NEAR(profile[l][0].z, 0.730, 5e-3) << l;
}

TEST(StorageThresholds, JsonAndTable) {
  const auto r = storage_thresholds(scheme_staged(builtin("five_bit")));
  const auto j = to_json(r);
  EXPECT_EQ(j["code"], "five_bit");
  EXPECT_NEAR(j["components"]["Z"]["t_star"].get<double>(), 0.2027, 5e-4);
  EXPECT_EQ(j["period"], 1);
  const auto table = format_table({r});
  EXPECT_NE(table.find("five_bit"), std::string::npos);
  EXPECT_NE(table.find("0.2027"), std::string::npos);
  EXPECT_NE(table.find("0.1376"), std::string::npos);
}
