#pragma once

// Sparse polynomials in (x, y, z) with exact rational coefficients, and
// univariate polynomials used by the fixed-point analysis.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qconcat/error.hpp"
#include "qconcat/rational.hpp"

namespace qconcat {

using Exponents = std::array<unsigned, 3>;

// Graded lexicographic: lower total degree first, then larger x exponent,
// then larger y exponent.
struct GradedLex {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const unsigned da = a[0] + a[1] + a[2], db = b[0] + b[1] + b[2];
    if (da != db) return da < db;
    if (a[0] != b[0]) return a[0] > b[0];
    return a[1] > b[1];
  }
};

class Polynomial3 {
 public:
  using Terms = std::map<Exponents, Rational, GradedLex>;

  Polynomial3() = default;

  // The coordinate polynomial x, y or z (var = 0, 1, 2).
  static Polynomial3 variable(int var) {
    require(var >= 0 && var < 3, "polynomial variable index out of range");
    Exponents e{0, 0, 0};
    e[var] = 1;
    return monomial(e, Rational(1));
  }

  static Polynomial3 monomial(const Exponents& e, const Rational& c) {
    Polynomial3 p;
    p.add_term(e, c);
    return p;
  }

  static Polynomial3 constant(const Rational& c) { return monomial({0, 0, 0}, c); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  Rational coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }

  unsigned degree_in(int var) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  bool has_constant_term() const { return terms_.count({0, 0, 0}) != 0; }

  // Bit v set when variable v appears.
  unsigned variable_mask() const {
    unsigned mask = 0;
    for (const auto& [e, c] : terms_)
      for (int v = 0; v < 3; ++v)
        if (e[v] > 0) mask |= 1u << v;
    return mask;
  }

  Polynomial3& operator+=(const Polynomial3& other) {
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
  }

  Polynomial3& operator*=(const Rational& factor) {
    if (factor == 0) terms_.clear();
    for (auto& [e, c] : terms_) c *= factor;
    return *this;
  }

  friend Polynomial3 operator+(Polynomial3 a, const Polynomial3& b) { return a += b; }
  friend Polynomial3 operator-(Polynomial3 a, const Polynomial3& b) { return a += b * Rational(-1); }
  friend Polynomial3 operator*(Polynomial3 a, const Rational& f) { return a *= f; }
  friend Polynomial3 operator*(const Rational& f, Polynomial3 a) { return a *= f; }

  friend Polynomial3 operator*(const Polynomial3& a, const Polynomial3& b) {
    Polynomial3 out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return out;
  }

  friend bool operator==(const Polynomial3&, const Polynomial3&) = default;

  double evaluate(double x, double y, double z) const {
    double total = 0.0;
    for (const auto& [e, c] : terms_)
      total += c.get_d() * std::pow(x, static_cast<int>(e[0])) * std::pow(y, static_cast<int>(e[1])) *
               std::pow(z, static_cast<int>(e[2]));
    return total;
  }

  Rational evaluate(const Rational& x, const Rational& y, const Rational& z) const {
    Rational total = 0;
    for (const auto& [e, c] : terms_) total += c * power(x, e[0]) * power(y, e[1]) * power(z, e[2]);
    return total;
  }

  // "3/2 x^2 y - 1/2 y^3"
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c] : terms_) {
      if (!out.empty()) out += c < 0 ? " - " : " + ";
      else if (c < 0) out += "-";
      const Rational mag = abs(c);
      const bool is_constant = e[0] + e[1] + e[2] == 0;
      std::string mono;
      for (int v = 0; v < 3; ++v) {
        if (e[v] == 0) continue;
        if (!mono.empty()) mono += " ";
        mono += "xyz"[v];
        if (e[v] > 1) mono += "^" + std::to_string(e[v]);
      }
      if (mag != 1 || is_constant) out += mag.get_str() + (is_constant ? "" : " ");
      out += mono;
    }
    return out;
  }

  static Rational power(const Rational& base, unsigned k) {
    Rational r = 1;
    for (unsigned i = 0; i < k; ++i) r *= base;
    return r;
  }

 private:
  Terms terms_;
};

// Powers of a value, computed on demand by repeated multiplication.
template <class T>
class PowerCache {
 public:
  explicit PowerCache(const T& base) : powers_{base} {}
  const T& operator()(unsigned k) {
    require(k >= 1, "power cache starts at exponent 1");
    while (powers_.size() < k) powers_.push_back(powers_.back() * powers_.front());
    return powers_[k - 1];
  }

 private:
  std::vector<T> powers_;
};

// p(v_x, v_y, v_z) over any commutative ring-like T offering T*T, T+=T and
// T*Rational, with a default-constructed T acting as zero. Constant terms
// cannot be represented without a unit and are rejected.
template <class T>
T substitute(const Polynomial3& p, std::array<PowerCache<T>, 3>& caches) {
  require(!p.has_constant_term(), "substitution requires a polynomial without constant term");
  T total{};
  for (const auto& [e, c] : p.terms()) {
    T mono;
    bool started = false;
    for (int v = 0; v < 3; ++v) {
      if (e[v] == 0) continue;
      if (!started) {
        mono = caches[v](e[v]);
        started = true;
      } else {
        mono = mono * caches[v](e[v]);
      }
    }
    total += mono * c;
  }
  return total;
}

template <class T>
T substitute(const Polynomial3& p, const std::array<T, 3>& values) {
  std::array<PowerCache<T>, 3> caches{PowerCache<T>(values[0]), PowerCache<T>(values[1]), PowerCache<T>(values[2])};
  return substitute(p, caches);
}

// Dense univariate polynomial, coefficient k multiplies v^k.
class Polynomial1 {
 public:
  Polynomial1() = default;
  explicit Polynomial1(std::vector<Rational> coefficients) : c_(std::move(coefficients)) { trim(); }

  const std::vector<Rational>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  double evaluate(double v) const {
    long double acc = 0.0L;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * v + static_cast<long double>(it->get_d());
    return static_cast<double>(acc);
  }

  Rational evaluate(const Rational& v) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * v + *it;
    return acc;
  }

  Polynomial1 derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * static_cast<unsigned long>(k));
    return Polynomial1(std::move(d));
  }

  Polynomial1 minus_identity() const {
    std::vector<Rational> d = c_;
    if (d.size() < 2) d.resize(2);
    d[1] -= 1;
    return Polynomial1(std::move(d));
  }

  friend bool operator==(const Polynomial1&, const Polynomial1&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// The restriction of p to variable `var`; p must not depend on the others.
inline Polynomial1 univariate(const Polynomial3& p, int var) {
  require(var >= 0 && var < 3, "polynomial variable index out of range");
  require((p.variable_mask() & ~(1u << var)) == 0,
          "polynomial " + p.to_string() + " depends on variables other than " + std::string(1, "xyz"[var]));
  std::vector<Rational> c(p.degree_in(var) + 1);
  for (const auto& [e, coefficient] : p.terms()) c[e[var]] += coefficient;
  return Polynomial1(std::move(c));
}

}  // namespace qconcat
