#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "qconcat/concatenation.hpp"
#include "qconcat/exp_series.hpp"
#include "support.hpp"

using namespace qconcat;

namespace {

// Term-by-term product collected in a map.
ExpSeries naive_product(const ExpSeries& f, const ExpSeries& g) {
  std::map<std::uint64_t, Rational> acc;
  for (const auto& a : f.terms())
    for (const auto& b : g.terms()) acc[a.rate + b.rate] += a.coefficient * b.coefficient;
  std::vector<ExpSeries::Term> terms;
  for (const auto& [rate, c] : acc) terms.push_back({rate, c});
  return ExpSeries::from_terms(terms);
}

ExpSeries random_series(std::mt19937& rng) {
  std::uniform_int_distribution<int> rate(1, 30), num(-40, 40), den(1, 9), count(1, 8);
  std::vector<ExpSeries::Term> terms;
  for (int k = count(rng); k > 0; --k) terms.push_back({static_cast<std::uint64_t>(rate(rng)), make_rational(num(rng), den(rng))});
  return ExpSeries::from_terms(terms);
}

// Σ b 2^{-a}: the series at τ = ln 2, exactly.
Rational at_ln2(const ExpSeries& s) {
  Rational total = 0;
  for (const auto& t : s.terms()) {
    BigInt d;
    mpz_ui_pow_ui(d.get_mpz_t(), 2, t.rate);
    total += t.coefficient / Rational(d);
  }
  return total;
}

}  // namespace

TEST(ExpSeries, CollectsTerms) {
  const auto s = ExpSeries::from_terms({{3, Rational(1, 2)}, {1, 1}, {3, Rational(-1, 2)}, {2, 0}, {1, 2}});
  ASSERT_EQ(s.term_count(), 1u);
  EXPECT_EQ(s.terms()[0].rate, 1u);
  EXPECT_EQ(s.terms()[0].coefficient, 3);
  EXPECT_TRUE(ExpSeries::exponential(4, 0).empty());
  auto t = ExpSeries::exponential(2, Rational(1, 3));
  t += t;
  EXPECT_EQ(t, ExpSeries::exponential(2, Rational(2, 3)));
}

TEST(ExpSeries, ProductMatchesNaiveCollection) {
  std::mt19937 rng(qtest::kSeed);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_series(rng), g = random_series(rng);
    EXPECT_EQ(f * g, naive_product(f, g));
    EXPECT_EQ((f + g) * g, f * g + g * g);
    EXPECT_EQ((f - f).term_count(), 0u);
  }
}

TEST(ExpSeries, CubeOfBitflipZ) {
  const auto z = ExpSeries::exponential(1, Rational(3, 2)) + ExpSeries::exponential(3, Rational(-1, 2));
  const auto c = pow(z, 3);
  ASSERT_EQ(c.term_count(), 4u);
  EXPECT_EQ(c.terms()[0].rate, 3u);
  EXPECT_EQ(c.terms()[0].coefficient, Rational(27, 8));
  EXPECT_EQ(c.coefficient_sum(), 1);
  EXPECT_THROW(pow(z, 0), InvalidInput);
}

TEST(ExpSeries, SubstitutionIntoPolynomial) {
  const auto m = diagonal_polynomials(builtin("bitflip"));
  const auto u = ExpSeries::exponential(1);
  const auto out = apply_to_series(m, {u, u, u});
  EXPECT_EQ(out[0], ExpSeries::exponential(3));
  EXPECT_EQ(out[1], ExpSeries::exponential(3));
  EXPECT_EQ(out[2], ExpSeries::exponential(1, Rational(3, 2)) + ExpSeries::exponential(3, Rational(-1, 2)));
}

TEST(ExpSeries, ShorTermCountsThroughLevelThree) {
  const auto s = scheme_series(builtin("shor"), 3);
  const std::size_t expected[4][3] = {{1, 1, 1}, {2, 3, 4}, {13, 33, 37}, {118, 339, 352}};
  for (unsigned l = 0; l <= 3; ++l)
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(s[l][c].term_count(), expected[l][c]) << l << ' ' << c;
      EXPECT_EQ(s[l][c].coefficient_sum(), 1);
    }
  EXPECT_EQ(s[3][2].coefficient_census(Rational(BigInt("1" + std::string(60, '0')))), 65u);
}

TEST(ExpSeries, MpfrEvaluationMatchesExactRationalOracle) {
  const auto s = scheme_series(builtin("shor"), 3);
  const double tau = std::log(2.0);
  for (unsigned l = 0; l <= 3; ++l)
    for (int c = 0; c < 3; ++c) {
      const auto r = evaluate(s[l][c], tau);
      EXPECT_NEAR(r.value, at_ln2(s[l][c]).get_d(), 1e-12) << l << ' ' << c;
      EXPECT_LE(r.error_bound, 1e-12);
      EXPECT_TRUE(passes_zero_residual_check(s[l][c]));
    }
  // Double evaluation is hopeless at level 3: the coefficients reach 1e70.
  EXPECT_GT(s[3][2].max_log2_coefficient(), 200);
}

TEST(ExpSeries, InsufficientPrecisionIsReported) {
  const auto s = scheme_series(builtin("shor"), 3);
  EXPECT_THROW(evaluate(s[3][2], 0.5, 64), NumericalFailure);
  EXPECT_THROW(evaluate(s[3][2], -0.5), InvalidInput);
  EXPECT_GT(default_precision_bits(s[3][2]), 64 + s[3][2].max_log2_coefficient());
}

TEST(ExpSeries, JsonRoundTrip) {
  const auto s = scheme_series(builtin("shor"), 2)[2][1];
  EXPECT_EQ(series_from_json(nlohmann::json::parse(to_json(s).dump())), s);
  EXPECT_THROW(series_from_json(nlohmann::json::parse("[{\"a\": 1}]")), InvalidInput);
  EXPECT_THROW(series_from_json(nlohmann::json::parse("[{\"a\": 1, \"num\": \"1\", \"den\": \"0\"}]")), InvalidInput);
}
