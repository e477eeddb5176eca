#pragma once

// Exact exponential sums s(τ) = Σ_i b_i e^{-a_i τ} with integer rates a_i and
// big-rational weights b_i.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qconcat/error.hpp"
#include "qconcat/rational.hpp"

namespace qconcat {

class ExpSeries {
 public:
  struct Term {
    std::uint64_t rate;
    Rational coefficient;
    friend bool operator==(const Term&, const Term&) = default;
  };

  ExpSeries() = default;

  // b e^{-a τ}.
  static ExpSeries exponential(std::uint64_t rate, const Rational& coefficient = Rational(1)) {
    ExpSeries s;
    if (coefficient != 0) s.terms_.push_back({rate, coefficient});
    return s;
  }

  // Terms may arrive unsorted and with repeated rates; they are collected.
  static ExpSeries from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.rate < b.rate; });
    ExpSeries s;
    for (auto& t : terms) {
      if (!s.terms_.empty() && s.terms_.back().rate == t.rate) {
        s.terms_.back().coefficient += t.coefficient;
        if (s.terms_.back().coefficient == 0) s.terms_.pop_back();
      } else if (t.coefficient != 0) {
        s.terms_.push_back(std::move(t));
      }
    }
    return s;
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  Rational coefficient_sum() const {
    Rational total = 0;
    for (const auto& t : terms_) total += t.coefficient;
    return total;
  }

  // Number of terms with |b_i| > threshold.
  std::size_t coefficient_census(const Rational& threshold) const {
    return static_cast<std::size_t>(std::count_if(terms_.begin(), terms_.end(),
                                                  [&](const Term& t) { return abs(t.coefficient) > threshold; }));
  }

  long max_log2_coefficient() const {
    long m = 0;
    for (const auto& t : terms_) m = std::max(m, log2_magnitude(t.coefficient) + 1);
    return m;
  }

  ExpSeries& operator+=(const ExpSeries& other) {
    if (&other == this) return *this *= Rational(2);
    std::vector<Term> merged;
    merged.reserve(terms_.size() + other.terms_.size());
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
      if (b == other.terms_.end() || (a != terms_.end() && a->rate < b->rate)) {
        merged.push_back(std::move(*a++));
      } else if (a == terms_.end() || b->rate < a->rate) {
        merged.push_back(*b++);
      } else {
        Rational c = a->coefficient + b->coefficient;
        if (c != 0) merged.push_back({a->rate, std::move(c)});
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  ExpSeries& operator*=(const Rational& factor) {
    if (factor == 0) terms_.clear();
    for (auto& t : terms_) t.coefficient *= factor;
    return *this;
  }

  friend ExpSeries operator+(ExpSeries a, const ExpSeries& b) { return a += b; }
  friend ExpSeries operator-(ExpSeries a, const ExpSeries& b) { return a += b * Rational(-1); }
  friend ExpSeries operator*(ExpSeries a, const Rational& f) { return a *= f; }
  friend ExpSeries operator*(const Rational& f, ExpSeries a) { return a *= f; }

  // Rates add pairwise; products are streamed into a dense accumulator indexed
  // by rate over a common denominator, so memory is bounded by the rate range
  // rather than by the number of pairwise products.
  friend ExpSeries operator*(const ExpSeries& f, const ExpSeries& g) {
    if (f.empty() || g.empty()) return {};
    const BigInt f_den = common_denominator(f);
    const BigInt g_den = common_denominator(g);
    const auto f_num = scaled_numerators(f, f_den);
    const auto g_num = scaled_numerators(g, g_den);
    const std::uint64_t lo = f.terms_.front().rate + g.terms_.front().rate;
    const std::uint64_t hi = f.terms_.back().rate + g.terms_.back().rate;
    std::vector<BigInt> acc(hi - lo + 1);
    for (std::size_t i = 0; i < f_num.size(); ++i)
      for (std::size_t j = 0; j < g_num.size(); ++j)
        mpz_addmul(acc[f.terms_[i].rate + g.terms_[j].rate - lo].get_mpz_t(), f_num[i].get_mpz_t(), g_num[j].get_mpz_t());
    const BigInt den = f_den * g_den;
    ExpSeries out;
    for (std::size_t k = 0; k < acc.size(); ++k) {
      if (acc[k] == 0) continue;
      Rational c(acc[k], den);
      c.canonicalize();
      out.terms_.push_back({lo + k, std::move(c)});
    }
    return out;
  }

  friend bool operator==(const ExpSeries&, const ExpSeries&) = default;

  // Quick double evaluation with no cancellation guard.
  double evaluate_double(double tau) const {
    double total = 0.0;
    for (const auto& t : terms_) total += t.coefficient.get_d() * std::exp(-static_cast<double>(t.rate) * tau);
    return total;
  }

 private:
  static BigInt common_denominator(const ExpSeries& s) {
    BigInt l = 1;
    for (const auto& t : s.terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coefficient.get_den_mpz_t());
    return l;
  }

  static std::vector<BigInt> scaled_numerators(const ExpSeries& s, const BigInt& den) {
    std::vector<BigInt> out;
    out.reserve(s.terms_.size());
    for (const auto& t : s.terms_) out.push_back(t.coefficient.get_num() * (den / t.coefficient.get_den()));
    return out;
  }

  std::vector<Term> terms_;
};

inline ExpSeries pow(const ExpSeries& s, unsigned k) {
  require(k >= 1, "series power must be at least 1");
  ExpSeries out = s;
  for (unsigned i = 1; i < k; ++i) out = out * s;
  return out;
}

namespace detail {

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace detail

struct SeriesEvaluation {
  double value;
  // A-priori bound on the rounding error of the returned value.
  double error_bound;
  long precision_bits;
};

// Default working precision: 64 bits beyond the largest coefficient scale,
// padded by the term count.
inline long default_precision_bits(const ExpSeries& s) {
  long pad = 8;
  for (std::size_t n = s.term_count(); n > 1; n >>= 1) ++pad;
  return 64 + s.max_log2_coefficient() + pad;
}

// Evaluates s(τ) in MPFR arithmetic. precision_bits <= 0 selects
// default_precision_bits. Each term is accurate to a few ulps, so the rounding
// error is bounded by (n + 4) 2^{-p} Σ|b_i e^{-a_i τ}| plus the final
// conversion; a bound above `tolerance` raises NumericalFailure.
inline SeriesEvaluation evaluate(const ExpSeries& s, double tau, long precision_bits = 0, double tolerance = 1e-12) {
  require(tau >= 0.0 && std::isfinite(tau), "series evaluation needs a finite τ >= 0");
  const long bits = precision_bits > 0 ? precision_bits : default_precision_bits(s);
  require(bits >= MPFR_PREC_MIN && bits <= 1'000'000, "unsupported precision: " + std::to_string(bits));
  detail::MpfrValue total(bits), magnitude(bits), term(bits), coefficient(bits), t(bits);
  mpfr_set_d(t.get(), tau, MPFR_RNDN);
  for (const auto& tm : s.terms()) {
    mpfr_mul_ui(term.get(), t.get(), tm.rate, MPFR_RNDN);
    mpfr_neg(term.get(), term.get(), MPFR_RNDN);
    mpfr_exp(term.get(), term.get(), MPFR_RNDN);
    mpfr_set_q(coefficient.get(), tm.coefficient.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), coefficient.get(), MPFR_RNDN);
    mpfr_add(total.get(), total.get(), term.get(), MPFR_RNDN);
    mpfr_abs(term.get(), term.get(), MPFR_RNDN);
    mpfr_add(magnitude.get(), magnitude.get(), term.get(), MPFR_RNDN);
  }
  const double value = mpfr_get_d(total.get(), MPFR_RNDN);
  const double scale = mpfr_get_d(magnitude.get(), MPFR_RNDU);
  const double bound = (static_cast<double>(s.term_count()) + 4.0) * std::ldexp(scale, static_cast<int>(-bits)) +
                       std::abs(value) * 0x1p-53;
  if (bound > tolerance)
    throw NumericalFailure("precision of " + std::to_string(bits) + " bits is insufficient at τ = " +
                           short_number(tau) + ": rounding bound " + short_number(bound));
  return {value, bound, bits};
}

// Residual check at τ = 0: the MPFR sum must reproduce Σ b_i exactly as a
// double.
inline bool passes_zero_residual_check(const ExpSeries& s, long precision_bits = 0) {
  const double exact = s.coefficient_sum().get_d();
  return std::abs(evaluate(s, 0.0, precision_bits).value - exact) <= 1e-15 * std::max(1.0, std::abs(exact));
}

inline nlohmann::json to_json(const ExpSeries& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : s.terms())
    out.push_back({{"a", t.rate}, {"num", t.coefficient.get_num().get_str()}, {"den", t.coefficient.get_den().get_str()}});
  return out;
}

inline ExpSeries series_from_json(const nlohmann::json& j) {
  require(j.is_array(), "series JSON must be an array");
  std::vector<ExpSeries::Term> terms;
  for (const auto& e : j) {
    require(e.contains("a") && e.contains("num") && e.contains("den"), "series term needs a, num, den");
    Rational c;
    require(c.set_str(e["num"].get<std::string>() + "/" + e["den"].get<std::string>(), 10) == 0, "malformed series coefficient");
    require(c.get_den() != 0, "zero denominator in series JSON");
    c.canonicalize();
    terms.push_back({e["a"].get<std::uint64_t>(), std::move(c)});
  }
  return ExpSeries::from_terms(std::move(terms));
}

}  // namespace qconcat
