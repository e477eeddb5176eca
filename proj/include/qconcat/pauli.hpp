#pragma once

// Phased n-qubit Pauli operators in symplectic form and exact rational linear
// combinations of them.
//
// A PauliOperator is i^k * (s_0 ⊗ s_1 ⊗ ... ⊗ s_{n-1}) where every s_j is one
// of the Hermitian matrices I, X, Y, Z. Qubit j stores (x_j, z_j) with
// I = (0,0), X = (1,0), Z = (0,1), Y = (1,1); the Hermitian Y is i·X·Z.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qconcat/error.hpp"
#include "qconcat/rational.hpp"

namespace qconcat {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::array<Pauli, 4> kPaulis = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
inline constexpr std::array<Pauli, 3> kNonIdentityPaulis = {Pauli::X, Pauli::Y, Pauli::Z};

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw InvalidInput(std::string("not a Pauli letter: '") + c + "'");
  }
}

inline int pauli_index(Pauli p) { return static_cast<int>(p); }

class PauliOperator {
 public:
  PauliOperator() = default;

  // Identity on n qubits.
  explicit PauliOperator(std::size_t n) : x_(n, 0), z_(n, 0) {}

  static PauliOperator from_letters(std::span<const Pauli> letters, int phase = 0) {
    PauliOperator p(letters.size());
    for (std::size_t q = 0; q < letters.size(); ++q) p.set(q, letters[q]);
    p.phase_ = normalize_phase(phase);
    return p;
  }

  // Accepts "XYZII" with an optional prefix among "+", "-", "i", "+i", "-i".
  static PauliOperator parse(std::string_view text) {
    int phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      phase += 1;
      ++pos;
    }
    PauliOperator p(text.size() - pos);
    for (std::size_t q = 0; pos < text.size(); ++pos, ++q) p.set(q, pauli_from_char(text[pos]));
    p.phase_ = normalize_phase(phase);
    return p;
  }

  std::size_t size() const { return x_.size(); }
  bool x(std::size_t q) const { return x_[q] != 0; }
  bool z(std::size_t q) const { return z_[q] != 0; }

  Pauli letter(std::size_t q) const {
    static constexpr std::array<Pauli, 4> kFromBits = {Pauli::I, Pauli::X, Pauli::Z, Pauli::Y};
    return kFromBits[x_[q] | (z_[q] << 1)];
  }

  void set(std::size_t q, Pauli p) {
    x_[q] = (p == Pauli::X || p == Pauli::Y) ? 1 : 0;
    z_[q] = (p == Pauli::Z || p == Pauli::Y) ? 1 : 0;
  }

  // Exponent k of the global phase i^k, in [0, 4).
  int phase() const { return phase_; }
  PauliOperator with_phase(int k) const {
    PauliOperator p = *this;
    p.phase_ = normalize_phase(k);
    return p;
  }
  PauliOperator unphased() const { return with_phase(0); }

  std::size_t weight() const {
    std::size_t w = 0;
    for (std::size_t q = 0; q < size(); ++q) w += (x_[q] | z_[q]);
    return w;
  }

  std::string letters() const {
    std::string s(size(), 'I');
    for (std::size_t q = 0; q < size(); ++q) s[q] = pauli_char(letter(q));
    return s;
  }

  std::string to_string() const {
    static constexpr std::array<const char*, 4> kPrefix = {"", "+i", "-", "-i"};
    return kPrefix[phase_] + letters();
  }

  friend bool operator==(const PauliOperator&, const PauliOperator&) = default;
  friend auto operator<=>(const PauliOperator&, const PauliOperator&) = default;

  static int normalize_phase(int k) { return ((k % 4) + 4) % 4; }

 private:
  std::vector<std::uint8_t> x_;
  std::vector<std::uint8_t> z_;
  int phase_ = 0;
};

// Exponent g with P(x1,z1) P(x2,z2) = i^g P(x1^x2, z1^z2) for Hermitian
// single-qubit Paulis.
inline int single_qubit_product_phase(bool x1, bool z1, bool x2, bool z2) {
  if (!x1 && !z1) return 0;
  if (x1 && z1) return static_cast<int>(z2) - static_cast<int>(x2);
  if (x1) return static_cast<int>(z2) * (2 * static_cast<int>(x2) - 1);
  return static_cast<int>(x2) * (1 - 2 * static_cast<int>(z2));
}

inline PauliOperator multiply(const PauliOperator& p, const PauliOperator& q) {
  require(p.size() == q.size(), "Pauli size mismatch: " + std::to_string(p.size()) + " vs " +
                                    std::to_string(q.size()));
  PauliOperator r(p.size());
  int phase = p.phase() + q.phase();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const bool x1 = p.x(k), z1 = p.z(k), x2 = q.x(k), z2 = q.z(k);
    phase += single_qubit_product_phase(x1, z1, x2, z2);
    const bool x = x1 != x2, z = z1 != z2;
    r.set(k, x ? (z ? Pauli::Y : Pauli::X) : (z ? Pauli::Z : Pauli::I));
  }
  return r.with_phase(phase);
}

inline PauliOperator operator*(const PauliOperator& p, const PauliOperator& q) { return multiply(p, q); }

// +1 if p and q commute, -1 if they anticommute.
inline int eta(const PauliOperator& p, const PauliOperator& q) {
  require(p.size() == q.size(), "Pauli size mismatch in eta");
  int parity = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    parity ^= (p.x(k) && q.z(k)) ? 1 : 0;
    parity ^= (p.z(k) && q.x(k)) ? 1 : 0;
  }
  return parity ? -1 : 1;
}

// Number of tensor factors equal to sigma; phase ignored.
inline std::size_t sigma_weight(const PauliOperator& p, Pauli sigma) {
  std::size_t w = 0;
  for (std::size_t q = 0; q < p.size(); ++q) w += p.letter(q) == sigma ? 1 : 0;
  return w;
}

inline PauliOperator tensor(const PauliOperator& a, const PauliOperator& b) {
  PauliOperator r(a.size() + b.size());
  for (std::size_t q = 0; q < a.size(); ++q) r.set(q, a.letter(q));
  for (std::size_t q = 0; q < b.size(); ++q) r.set(a.size() + q, b.letter(q));
  return r.with_phase(a.phase() + b.phase());
}

// Real-rational combination of unphased Pauli strings. Phases are folded
// into the coefficients; only real phases (±1) can be folded.
class OperatorSum {
 public:
  using Terms = std::map<std::string, Rational>;

  OperatorSum() = default;
  explicit OperatorSum(std::size_t n) : n_(n) {}

  static OperatorSum single(const PauliOperator& p, const Rational& coefficient = Rational(1)) {
    OperatorSum s(p.size());
    s.add_term(p, coefficient);
    return s;
  }

  std::size_t size() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  Rational coefficient(std::string_view letters) const {
    auto it = terms_.find(std::string(letters));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const PauliOperator& p, const Rational& coefficient) {
    require(p.size() == n_, "OperatorSum term size mismatch");
    require(p.phase() % 2 == 0, "imaginary phase cannot be folded into a real coefficient: " + p.to_string());
    add_letters(p.letters(), p.phase() == 2 ? Rational(-coefficient) : coefficient);
  }

  OperatorSum& operator+=(const OperatorSum& other) {
    require(other.n_ == n_, "OperatorSum size mismatch: " + std::to_string(n_) + " vs " + std::to_string(other.n_));
    for (const auto& [letters, c] : other.terms_) add_letters(letters, c);
    return *this;
  }

  OperatorSum& operator*=(const Rational& factor) {
    if (factor == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [letters, c] : terms_) c *= factor;
    return *this;
  }

  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
  friend OperatorSum operator*(OperatorSum a, const Rational& f) { return a *= f; }
  friend OperatorSum operator*(const Rational& f, OperatorSum a) { return a *= f; }
  friend bool operator==(const OperatorSum&, const OperatorSum&) = default;

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [letters, c] : terms_) {
      if (!out.empty()) out += c < 0 ? " - " : " + ";
      else if (c < 0) out += "-";
      Rational mag = abs(c);
      if (mag != 1) out += mag.get_str() + " ";
      out += letters;
    }
    return out;
  }

 private:
  void add_letters(const std::string& letters, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(letters, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::size_t n_ = 0;
  Terms terms_;
};

// s * p, term by term. Every product must carry a real phase.
inline OperatorSum multiply(const OperatorSum& s, const PauliOperator& p) {
  require(s.size() == p.size(), "OperatorSum/Pauli size mismatch");
  OperatorSum out(s.size());
  for (const auto& [letters, c] : s.terms()) out.add_term(PauliOperator::parse(letters) * p, c);
  return out;
}

inline OperatorSum tensor(const OperatorSum& a, const OperatorSum& b) {
  OperatorSum out(a.size() + b.size());
  for (const auto& [la, ca] : a.terms())
    for (const auto& [lb, cb] : b.terms()) out.add_term(PauliOperator::parse(la + lb), ca * cb);
  return out;
}

}  // namespace qconcat
