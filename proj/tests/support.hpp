#pragma once

// Shared generators and independent dense-matrix oracles for the tests.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qconcat/channel.hpp"
#include "qconcat/pauli.hpp"
#include "qconcat/realization.hpp"
#include "qconcat/stabilizer_code.hpp"

namespace qtest {

using qconcat::cd;
using Dense = Eigen::MatrixXcd;

inline constexpr unsigned kSeed = 20240611u;

// Diagonal channel from Pauli-error probabilities (p_I, p_X, p_Y, p_Z): the
// completely positive diagonal channels are exactly these.
inline qconcat::DiagonalChannel random_cp_diagonal(std::mt19937& rng) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double p[4];
  double total = 0.0;
  for (double& v : p) total += (v = e(rng) * (u(rng) < 0.3 ? 0.05 : 1.0));
  for (double& v : p) v /= total;
  return {p[0] + p[1] - p[2] - p[3], p[0] - p[1] + p[2] - p[3], p[0] - p[1] - p[2] + p[3]};
}

// Any diagonal channel in the cube [-1, 1]^3, CP or not.
inline qconcat::DiagonalChannel random_diagonal(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

inline Eigen::Matrix2cd single_pauli(qconcat::Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case qconcat::Pauli::I: m << 1, 0, 0, 1; break;
    case qconcat::Pauli::X: m << 0, 1, 1, 0; break;
    case qconcat::Pauli::Y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case qconcat::Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Dense kron(const Dense& a, const Dense& b) {
  Dense out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Qubit 0 is the leftmost tensor factor.
inline Dense dense(const qconcat::PauliOperator& p) {
  Dense m = Dense::Identity(1, 1);
  for (std::size_t q = 0; q < p.size(); ++q) m = kron(m, Dense(single_pauli(p.letter(q))));
  static const cd kPhase[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  return kPhase[p.phase()] * m;
}

inline Dense dense(const qconcat::OperatorSum& s) {
  const auto dim = Eigen::Index{1} << s.size();
  Dense m = Dense::Zero(dim, dim);
  for (const auto& [letters, c] : s.terms()) m += c.get_d() * dense(qconcat::PauliOperator::parse(letters));
  return m;
}

// Kraus operators of a single-qubit channel.
using Kraus = std::vector<Eigen::Matrix2cd>;

inline Kraus pauli_kraus(double px, double py, double pz) {
  using qconcat::Pauli;
  return {std::sqrt(1.0 - px - py - pz) * single_pauli(Pauli::I), std::sqrt(px) * single_pauli(Pauli::X),
          std::sqrt(py) * single_pauli(Pauli::Y), std::sqrt(pz) * single_pauli(Pauli::Z)};
}

inline Kraus amplitude_damping(double gamma) {
  Eigen::Matrix2cd k0, k1;
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  return {k0, k1};
}

// G_ij = ½ tr(σ_i Φ(σ_j)).
inline Eigen::Matrix4d transfer_matrix(const Kraus& k) {
  Eigen::Matrix4d g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
      for (const auto& a : k) out += a * single_pauli(qconcat::kPaulis[j]) * a.adjoint();
      g(i, j) = 0.5 * (single_pauli(qconcat::kPaulis[i]) * out).trace().real();
    }
  return g;
}

inline Dense apply_on_qubit(const Dense& rho, const Kraus& k, std::size_t qubit, std::size_t n) {
  Dense out = Dense::Zero(rho.rows(), rho.cols());
  for (const auto& a : k) {
    Dense op = Dense::Identity(1, 1);
    for (std::size_t q = 0; q < n; ++q) op = kron(op, q == qubit ? Dense(a) : Dense(Dense::Identity(2, 2)));
    out += op * rho * op.adjoint();
  }
  return out;
}

// Effective channel by simulation: encode the logical Pauli σ' with an explicit
// code basis, apply the noise qubit by qubit, measure the syndrome, apply the
// tabulated recovery and read off the logical Pauli expectations.
inline Eigen::Matrix4d simulated_effective_channel(const qconcat::StabilizerCode& code, const Kraus& noise) {
  using namespace qconcat;
  const std::size_t n = code.n();
  const auto dim = Eigen::Index{1} << n;
  Dense projector = Dense::Identity(dim, dim);
  for (const auto& g : code.generators()) projector = projector * (Dense::Identity(dim, dim) + dense(g)) * 0.5;
  // |0̄>: the +1 eigenvector of Z̄ inside the codespace.
  const Dense zero_proj = projector * (Dense::Identity(dim, dim) + dense(code.logical_z())) * 0.5;
  Eigen::Index best = 0;
  zero_proj.colwise().norm().maxCoeff(&best);
  Eigen::VectorXcd zero = zero_proj.col(best).normalized();
  Eigen::VectorXcd one = dense(code.logical_x()) * zero;
  Dense basis(dim, 2);
  basis << zero, one;
  const RecoveryTable table = recovery_table(code);
  std::vector<Dense> syndrome_projectors;
  for (Syndrome s = 0; s < code.group_order(); ++s) {
    Dense p = Dense::Identity(dim, dim);
    for (std::size_t g = 0; g < code.generator_count(); ++g) {
      const double sign = (s >> g & 1U) ? -1.0 : 1.0;
      p = p * (Dense::Identity(dim, dim) + sign * dense(code.generators()[g])) * 0.5;
    }
    syndrome_projectors.push_back(dense(table[s]) * p);
  }
  Eigen::Matrix4d g;
  for (int j = 0; j < 4; ++j) {
    Dense rho = basis * Dense(single_pauli(kPaulis[j])) * basis.adjoint();
    for (std::size_t q = 0; q < n; ++q) rho = apply_on_qubit(rho, noise, q, n);
    Dense corrected = Dense::Zero(dim, dim);
    for (const auto& rp : syndrome_projectors) corrected += rp * rho * rp.adjoint();
    for (int i = 0; i < 4; ++i) g(i, j) = 0.5 * (dense(code.logical(kPaulis[i])) * corrected).trace().real();
  }
  return g;
}

// Stable real-valued modal realization with conjugate pole pairs.
inline qconcat::Realization random_modal(std::mt19937& rng, int real_poles, int pairs) {
  std::uniform_real_distribution<double> decay(0.5, 6.0), freq(0.2, 4.0), res(-1.0, 1.0);
  const int n = real_poles + 2 * pairs;
  Eigen::VectorXcd poles(n), b(n);
  int k = 0;
  for (int i = 0; i < real_poles; ++i, ++k) {
    poles(k) = -decay(rng) - 0.1 * i;
    b(k) = res(rng);
  }
  for (int i = 0; i < pairs; ++i, k += 2) {
    const cd p(-decay(rng), freq(rng));
    const cd r(res(rng), res(rng));
    poles(k) = p;
    poles(k + 1) = std::conj(p);
    b(k) = r;
    b(k + 1) = std::conj(r);
  }
  return qconcat::Realization::modal(poles, b, Eigen::RowVectorXcd::Ones(n));
}

// Dense stable realization with real A, B, C.
inline qconcat::Realization random_dense(std::mt19937& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  const double shift = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().real().maxCoeff() + 0.5;
  a -= shift * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  Eigen::RowVectorXd c(n);
  for (int i = 0; i < n; ++i) b(i) = g(rng), c(i) = g(rng);
  return qconcat::Realization(a.cast<cd>(), b.cast<cd>(), c.cast<cd>());
}

}  // namespace qtest
