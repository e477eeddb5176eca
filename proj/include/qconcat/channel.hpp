#pragma once

// Effective channel of a logical qubit: G_σσ' = tr(D_σ E[E_σ']) for product
// register dynamics E = E_1 ⊗ ... ⊗ E_n, plus single-qubit channel utilities.
//
// Channels are 4x4 Pauli transfer matrices indexed (I, X, Y, Z), acting on
// the vector (<I>, <X>, <Y>, <Z>). All times are the dimensionless τ = γt.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "qconcat/error.hpp"
#include "qconcat/pauli.hpp"
#include "qconcat/stabilizer_code.hpp"

namespace qconcat {

class QubitChannel {
 public:
  static constexpr double kTraceTolerance = 1e-9;

  QubitChannel() : g_(Eigen::Matrix4d::Identity()) {}

  explicit QubitChannel(const Eigen::Matrix4d& g) : g_(g) {
    const double deviation = (g_.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff();
    require(std::isfinite(g_.sum()), "channel has non-finite entries");
    require(deviation <= kTraceTolerance,
            "channel is not trace preserving: first row deviates by " + short_number(deviation));
  }

  static QubitChannel identity() { return QubitChannel(); }

  const Eigen::Matrix4d& matrix() const { return g_; }
  double operator()(Pauli row, Pauli col) const { return g_(pauli_index(row), pauli_index(col)); }

  bool is_diagonal(double tolerance = 0.0) const {
    Eigen::Matrix4d off = g_;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= tolerance;
  }

 private:
  Eigen::Matrix4d g_;
};

// [x, y, z] denotes diag(1, x, y, z).
struct DiagonalChannel {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  QubitChannel to_channel() const {
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g.diagonal() << 1.0, x, y, z;
    return QubitChannel(g);
  }

  double component(Pauli sigma) const {
    switch (sigma) {
      case Pauli::X: return x;
      case Pauli::Y: return y;
      case Pauli::Z: return z;
      case Pauli::I: return 1.0;
    }
    return 1.0;
  }

  friend bool operator==(const DiagonalChannel&, const DiagonalChannel&) = default;
};

struct ProductRegisterChannel {
  std::vector<QubitChannel> factors;

  static ProductRegisterChannel uniform(std::size_t n, const QubitChannel& g) {
    return ProductRegisterChannel{std::vector<QubitChannel>(n, g)};
  }
  std::size_t size() const { return factors.size(); }
};

// (<I>, <X>, <Y>, <Z>) with <I> = 1 and Bloch norm at most 1.
class LogicalState {
 public:
  LogicalState(double x, double y, double z) : v_(1.0, x, y, z) {
    require(x * x + y * y + z * z <= 1.0 + 1e-12, "Bloch vector longer than 1");
  }
  static LogicalState eigenstate(Pauli sigma, int sign = 1) {
    double s = sign >= 0 ? 1.0 : -1.0;
    switch (sigma) {
      case Pauli::X: return LogicalState(s, 0, 0);
      case Pauli::Y: return LogicalState(0, s, 0);
      case Pauli::Z: return LogicalState(0, 0, s);
      case Pauli::I: break;
    }
    throw InvalidInput("identity has no eigenstate label");
  }
  const Eigen::Vector4d& vector() const { return v_; }
  bool is_pure(double tolerance = 1e-12) const { return std::abs(v_.tail<3>().squaredNorm() - 1.0) <= tolerance; }

 private:
  Eigen::Vector4d v_;
};

// Pauli-basis expansions of a code's encoding and decoding operators:
//   E_σ' = Σ_μ α^σ'_μ (½μ_1) ⊗ ... ⊗ (½μ_n),   D_σ = Σ_ν β^σ_ν ν_1 ⊗ ... ⊗ ν_n.
struct CoefficientTables {
  std::size_t n = 0;
  std::array<OperatorSum::Terms, 4> alpha;
  std::array<OperatorSum::Terms, 4> beta;
};

inline CoefficientTables alpha_beta(const StabilizerCode& code, const RecoveryTable& table) {
  CoefficientTables t;
  t.n = code.n();
  const auto enc = encoding_ops(code);
  const auto dec = decoding_ops(code, table);
  BigInt two_to_n;
  mpz_ui_pow_ui(two_to_n.get_mpz_t(), 2, static_cast<unsigned long>(code.n()));
  for (Pauli sigma : kPaulis) {
    const int s = pauli_index(sigma);
    for (const auto& [letters, c] : enc[s].terms()) t.alpha[s][letters] = c * two_to_n;
    t.beta[s] = dec.ops[s].terms();
  }
  return t;
}

inline CoefficientTables alpha_beta(const StabilizerCode& code) { return alpha_beta(code, recovery_table(code)); }

namespace detail {

struct NumericTerm {
  std::vector<std::uint8_t> letters;
  double coefficient;
};

inline std::vector<NumericTerm> numeric_terms(const OperatorSum::Terms& terms) {
  std::vector<NumericTerm> out;
  out.reserve(terms.size());
  for (const auto& [letters, c] : terms) {
    NumericTerm t{std::vector<std::uint8_t>(letters.size()), c.get_d()};
    for (std::size_t q = 0; q < letters.size(); ++q) t.letters[q] = static_cast<std::uint8_t>(pauli_index(pauli_from_char(letters[q])));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

// G̃_σσ' = Σ_{μ,ν} β^σ_ν α^σ'_μ Π_j G^(j)_{ν_j μ_j}. The factors need not be
// trace preserving, which makes the multilinearity of the map testable.
inline Eigen::Matrix4d contract(const CoefficientTables& tables, const std::vector<Eigen::Matrix4d>& factors) {
  require(factors.size() == tables.n, "register has " + std::to_string(tables.n) + " qubits but " +
                                          std::to_string(factors.size()) + " factor channels were given");
  std::array<std::vector<detail::NumericTerm>, 4> alpha, beta;
  for (int s = 0; s < 4; ++s) {
    alpha[s] = detail::numeric_terms(tables.alpha[s]);
    beta[s] = detail::numeric_terms(tables.beta[s]);
  }
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int row = 0; row < 4; ++row) {
    for (int col = 0; col < 4; ++col) {
      double total = 0.0;
      for (const auto& nu : beta[row]) {
        double partial = 0.0;
        for (const auto& mu : alpha[col]) {
          double product = mu.coefficient;
          for (std::size_t j = 0; j < tables.n && product != 0.0; ++j) product *= factors[j](nu.letters[j], mu.letters[j]);
          partial += product;
        }
        total += nu.coefficient * partial;
      }
      out(row, col) = total;
    }
  }
  return out;
}

inline QubitChannel effective_channel(const CoefficientTables& tables, const ProductRegisterChannel& dynamics) {
  std::vector<Eigen::Matrix4d> factors;
  factors.reserve(dynamics.size());
  for (const auto& f : dynamics.factors) factors.push_back(f.matrix());
  return QubitChannel(contract(tables, factors));
}

inline QubitChannel effective_channel(const StabilizerCode& code, const ProductRegisterChannel& dynamics) {
  require(dynamics.size() == code.n(), code.name() + " has " + std::to_string(code.n()) + " qubits but dynamics has " +
                                           std::to_string(dynamics.size()) + " factors");
  return effective_channel(alpha_beta(code), dynamics);
}

// [e^{-τ}, e^{-τ}, e^{-τ}].
inline DiagonalChannel depolarizing(double tau) {
  require(tau >= 0.0 && std::isfinite(tau), "depolarizing time must be a finite nonnegative number");
  const double u = std::exp(-tau);
  return DiagonalChannel{u, u, u};
}

inline bool pauli_probability_in_range(double p) { return p >= 0.0 && p <= 0.75; }

// [1 - 4p/3]^3. Probabilities outside [0, 3/4] are still evaluated; see
// pauli_probability_in_range.
inline DiagonalChannel pauli_error(double p) {
  require(std::isfinite(p), "Pauli error probability must be finite");
  const double v = 1.0 - 4.0 * p / 3.0;
  return DiagonalChannel{v, v, v};
}

struct CpCheck {
  bool completely_positive;
  // Smallest Choi eigenvalue (trace-normalized); for diagonal channels the
  // smallest of the four Pauli-twirl probabilities.
  double margin;
};

inline CpCheck is_completely_positive(const DiagonalChannel& d, double tolerance = 1e-10) {
  const std::array<double, 4> q = {(1 + d.x + d.y + d.z) / 4, (1 + d.x - d.y - d.z) / 4, (1 - d.x + d.y - d.z) / 4,
                                   (1 - d.x - d.y + d.z) / 4};
  const double margin = *std::min_element(q.begin(), q.end());
  return {margin >= -tolerance, margin};
}

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, C(0, -1), C(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Choi matrix J = ¼ Σ_ij G_ij σ_j^T ⊗ σ_i, normalized to unit trace.
inline Eigen::Matrix4cd choi_matrix(const QubitChannel& g) {
  Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
  for (Pauli row : kPaulis)
    for (Pauli col : kPaulis) {
      const double v = g(row, col);
      if (v == 0.0) continue;
      const Eigen::Matrix2cd a = pauli_matrix(col).transpose();
      const Eigen::Matrix2cd b = pauli_matrix(row);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) j.block<2, 2>(2 * r, 2 * c) += 0.25 * v * a(r, c) * b;
    }
  return j;
}

inline CpCheck is_completely_positive(const QubitChannel& g, double tolerance = 1e-10) {
  if (g.is_diagonal()) {
    const auto& m = g.matrix();
    return is_completely_positive(DiagonalChannel{m(1, 1), m(2, 2), m(3, 3)}, tolerance);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(choi_matrix(g), Eigen::EigenvaluesOnly);
  const double margin = solver.eigenvalues().minCoeff();
  return {margin >= -tolerance, margin};
}

// ½ ρᵀ G ρ for a pure logical state.
inline double fidelity(const LogicalState& state, const QubitChannel& g) {
  require(state.is_pure(1e-9), "fidelity is defined here for pure logical states");
  return 0.5 * state.vector().dot(g.matrix() * state.vector());
}

inline nlohmann::json to_json(const QubitChannel& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) row.push_back(g.matrix()(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json to_json(const DiagonalChannel& d) { return nlohmann::json::array({d.x, d.y, d.z}); }

// Accepts a 4x4 row-major array or a diagonal [x, y, z].
inline QubitChannel channel_from_json(const nlohmann::json& j) {
  require(j.is_array(), "channel JSON must be an array");
  if (j.size() == 3 && j[0].is_number()) {
    return DiagonalChannel{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}.to_channel();
  }
  require(j.size() == 4, "channel JSON must be [x,y,z] or a 4x4 array");
  Eigen::Matrix4d g;
  for (int r = 0; r < 4; ++r) {
    require(j[r].is_array() && j[r].size() == 4, "channel JSON rows must have 4 entries");
    for (int c = 0; c < 4; ++c) {
      require(j[r][c].is_number(), "channel JSON entries must be numbers");
      g(r, c) = j[r][c].get<double>();
    }
  }
  return QubitChannel(g);
}

}  // namespace qconcat
