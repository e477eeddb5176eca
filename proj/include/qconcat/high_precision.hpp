#pragma once

// Balanced truncation of exact exponential series in MPFR arithmetic. The
// Cauchy Gramians of an exact series are too ill-conditioned for doubles
// beyond a handful of terms.

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qconcat/balanced_truncation.hpp"
#include "qconcat/exp_series.hpp"

namespace qconcat {

// Variable-precision MPFR real; the working precision is set per computation.
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

}  // namespace qconcat

namespace Eigen {

template <>
struct NumTraits<qconcat::BigFloat> : GenericNumTraits<qconcat::BigFloat> {
  using R = qconcat::BigFloat;
  using Real = R;
  using NonInteger = R;
  using Literal = R;
  using Nested = R;
  enum { IsInteger = 0, IsSigned = 1, IsComplex = 0, RequireInitialization = 1, ReadCost = 10, AddCost = 10, MulCost = 40 };
  static Real epsilon() { return std::numeric_limits<R>::epsilon(); }
  static Real dummy_precision() { return epsilon() * 1000; }
  static Real highest() { return (std::numeric_limits<R>::max)(); }
  static Real lowest() { return std::numeric_limits<R>::lowest(); }
  static int digits10() { return static_cast<int>(R::default_precision()); }
  static int digits() { return static_cast<int>(std::ceil(R::default_precision() * 3.3219280948873623)); }
  static Real infinity() { return std::numeric_limits<R>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<R>::quiet_NaN(); }
};

}  // namespace Eigen

namespace qconcat {

namespace detail {

// Scoped working precision in decimal digits.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits) : saved_(BigFloat::default_precision()) {
    BigFloat::default_precision(digits);
  }
  ~PrecisionGuard() { BigFloat::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

inline BigFloat to_big(const Rational& r) {
  BigFloat num(r.get_num().get_str()), den(r.get_den().get_str());
  return num / den;
}

}  // namespace detail

// Enough digits to resolve the Cauchy Gramians of s: a base of 60 plus the
// decimal scale of the largest coefficient, twice.
inline unsigned default_series_digits(const ExpSeries& s) {
  return 60u + 2u * static_cast<unsigned>(std::ceil(s.max_log2_coefficient() * 0.30103));
}

struct ExactBalancing {
  std::vector<double> hsv;
  std::size_t resolved = 0;
  unsigned digits = 0;
  // Balanced system on the resolved dimensions, rounded to double.
  Realization system;
};

// Balances the minimal realization A = diag(-a_i), B = (b_i), C = (1, ..., 1)
// of s in `digits` decimal digits (0 picks default_series_digits).
inline ExactBalancing exact_balance(const ExpSeries& s, unsigned digits = 0) {
  require(!s.empty(), "cannot balance the zero series");
  ExactBalancing out;
  out.digits = digits ? digits : default_series_digits(s);
  detail::PrecisionGuard guard(out.digits);
  const auto n = static_cast<Eigen::Index>(s.term_count());
  DenseVector<BigFloat> poles(n), b(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = s.terms()[static_cast<std::size_t>(i)];
    require(t.rate > 0, "series rates must be positive for a stable realization");
    poles(i) = -BigFloat(static_cast<unsigned long long>(t.rate));
    b(i) = detail::to_big(t.coefficient);
    c(i) = BigFloat(1);
  }
  DenseMatrix<BigFloat> wc, wo;
  modal_gramians<BigFloat>(poles, b, c, wc, wo);
  // Noise floor well below anything double precision can represent.
  const BigFloat floor = boost::multiprecision::pow(BigFloat(10), -static_cast<int>(out.digits / 2));
  const auto sr = square_root_balance<BigFloat>(wc, wo, floor);
  for (const auto& h : sr.hsv) out.hsv.push_back(static_cast<double>(h));
  out.resolved = static_cast<std::size_t>(sr.rank);
  const DenseMatrix<BigFloat> ar = sr.t_left * poles.asDiagonal() * sr.t_right;
  const DenseVector<BigFloat> br = sr.t_left * b;
  const DenseMatrix<BigFloat> cr = c.transpose() * sr.t_right;
  const Eigen::Index k = sr.rank;
  MatrixC a(k, k);
  VectorC bb(k);
  RowVectorC cc(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    bb(i) = static_cast<double>(br(i));
    cc(i) = static_cast<double>(cr(0, i));
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = static_cast<double>(ar(i, j));
  }
  out.system = Realization(std::move(a), std::move(bb), std::move(cc));
  return out;
}

// Truncation of an exactly balanced series realization.
inline TruncationResult truncate(const ExactBalancing& e, const TruncationPolicy& policy) {
  BalancedRealization b{e.system, {e.hsv, e.resolved}};
  TruncationResult r = truncate(b, policy);
  r.system.to_modal();
  return r;
}

}  // namespace qconcat
