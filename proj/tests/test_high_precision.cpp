#include <cmath>

#include <gtest/gtest.h>

#include "qconcat/exact_reduction.hpp"
#include "qconcat/high_precision.hpp"

using namespace qconcat;

TEST(ExactBalance, ShorSecondLevelZ) {
  const auto s = scheme_series(builtin("shor"), 2)[2][2];
  ASSERT_EQ(s.term_count(), 37u);
  const auto e = exact_balance(s);
  ASSERT_EQ(e.hsv.size(), 37u);
  const double expected[] = {0.253919, 0.036623, 0.00531013, 0.000595143, 5.36628e-05};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(e.hsv[i], expected[i], 1e-5 * expected[i]) << i;
  EXPECT_GE(e.resolved, 20u);
}

// Distinct rates with nonzero coefficients give a minimal realization: every
// HSV is positive.
TEST(ExactBalance, DistinctExponentsGiveFullRank) {
  std::vector<ExpSeries::Term> terms;
  for (std::uint64_t a = 1; a <= 8; ++a) terms.push_back({a, Rational(a % 2 ? 1 : -1, static_cast<long>(a))});
  const auto e = exact_balance(ExpSeries::from_terms(terms), 80);
  ASSERT_EQ(e.hsv.size(), 8u);
  EXPECT_EQ(e.resolved, 8u);
  for (double h : e.hsv) EXPECT_GT(h, 0.0);
  EXPECT_THROW(exact_balance(ExpSeries()), InvalidInput);
}

TEST(ExactBalance, TruncationMatchesTheSeries) {
  const auto s = scheme_series(builtin("shor"), 2)[2][0];
  const auto r = truncate(exact_balance(s), TruncationPolicy::threshold(0.0));
  for (double t : {0.0, 0.2, 0.7}) EXPECT_NEAR(r.system.evaluate(t), s.evaluate_double(t), 1e-9);
}

TEST(ExactReduce, NoTruncationKeepsSeriesOrders) {
  ReductionOptions opt;
  opt.levels = 2;
  opt.h_min = 0.0;
  const auto report = exact_reduce(builtin("shor"), opt);
  EXPECT_EQ(report.orders[1], (std::array<Eigen::Index, 3>{2, 3, 4}));
  EXPECT_EQ(report.orders[2], (std::array<Eigen::Index, 3>{13, 33, 37}));
  for (const auto& e : report.max_error)
    for (double v : e) EXPECT_LE(v, 1e-8);
}

TEST(ExactReduce, TruncatedLevelsAndLimits) {
  ReductionOptions opt;
  opt.levels = 2;
  const auto report = exact_reduce(builtin("shor"), opt);
  for (const auto& e : report.max_error)
    for (double v : e) EXPECT_LE(v, 1e-2);
  opt.levels = kMaxExactReductionLevel + 1;
  EXPECT_THROW(exact_reduce(builtin("shor"), opt), InvalidInput);
}

// Order-4 truncation of z̃_2: the H∞ bound holds on the imaginary axis; the
// impulse response error peaks at τ = 0, slightly above 1e-3.
TEST(ExactBalance, OrderFourTruncationOfShorZ) {
  const auto s = scheme_series(builtin("shor"), 2)[2][2];
  const auto exact = Realization::from_series(s);
  const auto r = truncate(exact_balance(s), TruncationPolicy::fixed_order(4));
  EXPECT_NEAR(r.error_bound, 1.17e-4, 1e-6);
  for (int k = 0; k < 30; ++k) {
    const double w = k == 0 ? 0.0 : std::pow(10.0, -2.0 + 5.0 * k / 29.0);
    EXPECT_LE(std::abs(exact.transfer({0.0, w}) - r.system.transfer({0.0, w})), r.error_bound + 1e-9) << w;
  }
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const double t = 1.5 * i / 299.0;
    worst = std::max(worst, std::abs(r.system.evaluate(t) - evaluate(s, t).value));
  }
  EXPECT_LT(worst, 1.5e-3);
  EXPECT_GT(worst, 1e-3);
}
