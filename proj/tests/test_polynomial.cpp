#include <random>

#include <gtest/gtest.h>

#include "qconcat/polynomial.hpp"
#include "support.hpp"

using namespace qconcat;

namespace {

const Polynomial3 kX = Polynomial3::variable(0), kY = Polynomial3::variable(1), kZ = Polynomial3::variable(2);

Polynomial3 random_polynomial(std::mt19937& rng) {
  std::uniform_int_distribution<int> ex(0, 3), num(-5, 5), den(1, 4);
  Polynomial3 p;
  for (int k = 0; k < 5; ++k)
    p.add_term({static_cast<unsigned>(ex(rng)), static_cast<unsigned>(ex(rng)), static_cast<unsigned>(ex(rng))},
               make_rational(num(rng), den(rng)));
  return p;
}

}  // namespace

TEST(Polynomial3, Arithmetic) {
  const auto p = kX * kX * kY * Rational(3, 2) - kY * kY * kY * Rational(1, 2);
  EXPECT_EQ(p.term_count(), 2u);
  EXPECT_EQ(p.coefficient({2, 1, 0}), Rational(3, 2));
  EXPECT_EQ(p.coefficient({0, 3, 0}), Rational(-1, 2));
  EXPECT_EQ(p.degree(), 3u);
  EXPECT_EQ(p.degree_in(0), 2u);
  EXPECT_EQ(p.variable_mask(), 3u);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_FALSE(p.has_constant_term());
  EXPECT_TRUE((p + Polynomial3::constant(1)).has_constant_term());
}

TEST(Polynomial3, RingLawsOnRandomPolynomials) {
  std::mt19937 rng(qtest::kSeed);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_polynomial(rng), b = random_polynomial(rng), c = random_polynomial(rng);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    const Rational x(1, 3), y(-2, 5), z(7, 4);
    EXPECT_EQ((a * b).evaluate(x, y, z), a.evaluate(x, y, z) * b.evaluate(x, y, z));
    EXPECT_NEAR((a * b).evaluate(0.3, -0.4, 0.9), a.evaluate(0.3, -0.4, 0.9) * b.evaluate(0.3, -0.4, 0.9), 1e-12);
  }
}

TEST(Polynomial3, ToString) {
  const auto p = kX * kX * kX * Rational(3, 2) - kY * Rational(1, 2);
  EXPECT_EQ(p.to_string(), "-1/2 y + 3/2 x^3");
  EXPECT_EQ(Polynomial3().to_string(), "0");
}

TEST(Polynomial1, DerivativeAndFixedPointForm) {
  const auto q = univariate(kZ * Rational(3, 2) - kZ * kZ * kZ * Rational(1, 2), 2);
  EXPECT_EQ(q.degree(), 3);
  EXPECT_EQ(q.derivative().coefficients(), (std::vector<Rational>{Rational(3, 2), 0, Rational(-3, 2)}));
  EXPECT_EQ(q.minus_identity().coefficients(), (std::vector<Rational>{0, Rational(1, 2), 0, Rational(-1, 2)}));
  EXPECT_EQ(q.evaluate(Rational(1)), 1);
  EXPECT_NEAR(q.evaluate(0.5), 0.6875, 1e-15);
  EXPECT_TRUE(univariate(kX, 0).minus_identity().is_zero());
  EXPECT_THROW(univariate(kX * kY, 0), InvalidInput);
}

TEST(PowerCache, Powers) {
  PowerCache<Rational> cache(Rational(2, 3));
  EXPECT_EQ(cache(5), Rational(32, 243));
  EXPECT_EQ(cache(1), Rational(2, 3));
  EXPECT_EQ(Polynomial3::power(Rational(-1, 2), 3), Rational(-1, 8));
}
