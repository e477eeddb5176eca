#pragma once

// Impulse-response Gramians, square-root balancing, Hankel singular values
// and balanced truncation.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "qconcat/error.hpp"
#include "qconcat/lyapunov.hpp"
#include "qconcat/realization.hpp"

namespace qconcat {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct GramianPair {
  MatrixC wc;
  MatrixC wo;
};

// Cauchy-structured Gramians of a diagonal system:
//   W_c[i][j] = B_i conj(B_j) / (-λ_i - conj λ_j),
//   W_o[i][j] = conj(C_i) C_j / (-conj λ_i - λ_j).
template <class Scalar>
void modal_gramians(const DenseVector<Scalar>& poles, const DenseVector<Scalar>& b, const DenseVector<Scalar>& c,
                    DenseMatrix<Scalar>& wc, DenseMatrix<Scalar>& wo) {
  using Eigen::numext::conj;
  const Eigen::Index n = poles.size();
  wc.resize(n, n);
  wo.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      wc(i, j) = b(i) * conj(b(j)) / (-poles(i) - conj(poles(j)));
      wo(i, j) = conj(c(i)) * c(j) / (-conj(poles(i)) - poles(j));
    }
}

inline GramianPair gramians(const Realization& f) {
  require(f.is_stable(), "Gramians need a stable realization");
  GramianPair g;
  if (f.is_modal()) {
    modal_gramians<cd>(f.poles(), f.b(), f.c().transpose(), g.wc, g.wo);
    return g;
  }
  const MatrixC a = f.a();
  g.wc = solve_lyapunov(a, f.b() * f.b().adjoint());
  g.wo = solve_lyapunov(a.adjoint(), f.c().adjoint() * f.c());
  return g;
}

// W = L L* from the Hermitian eigendecomposition, with negative eigenvalues
// (rounding noise) clipped to zero.
template <class Scalar>
DenseMatrix<Scalar> psd_factor(const DenseMatrix<Scalar>& w) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using std::sqrt;
  const DenseMatrix<Scalar> sym = (w + w.adjoint()) * Scalar(Real(0.5));
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(sym);
  if (es.info() != Eigen::Success) throw NumericalFailure("Gramian eigendecomposition did not converge");
  DenseMatrix<Scalar> l = es.eigenvectors();
  for (Eigen::Index k = 0; k < l.cols(); ++k) {
    Real e = es.eigenvalues()(k);
    if (e < Real(0)) e = Real(0);
    l.col(k) *= Scalar(sqrt(e));
  }
  return l;
}

template <class Scalar>
struct SquareRootBalancing {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  // All Hankel singular values, descending.
  std::vector<Real> hsv;
  // Leading dimensions with h_i above the noise floor.
  Eigen::Index rank = 0;
  // x_balanced = t_left x and x = t_right x_balanced on the leading dims.
  DenseMatrix<Scalar> t_left;
  DenseMatrix<Scalar> t_right;
};

// Square-root method: with W_c = L_c L_c*, W_o = L_o L_o* and the SVD
// L_o* L_c = U Σ V*, T_left = Σ^{-1/2} U* L_o*, T_right = L_c V Σ^{-1/2}.
// Values below relative_floor · h_1 are counted as numerical noise.
template <class Scalar>
SquareRootBalancing<Scalar> square_root_balance(const DenseMatrix<Scalar>& wc, const DenseMatrix<Scalar>& wo,
                                                typename Eigen::NumTraits<Scalar>::Real relative_floor) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using std::sqrt;
  const DenseMatrix<Scalar> lc = psd_factor<Scalar>(wc);
  const DenseMatrix<Scalar> lo = psd_factor<Scalar>(wo);
  const DenseMatrix<Scalar> m = lo.adjoint() * lc;
  DenseMatrix<Scalar> u, v;
  DenseVector<Real> sigma;
  if constexpr (std::is_same_v<Scalar, cd> || std::is_same_v<Scalar, double>) {
    Eigen::BDCSVD<DenseMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    v = svd.matrixV();
    sigma = svd.singularValues();
  } else {
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU();
    v = svd.matrixV();
    sigma = svd.singularValues();
  }
  SquareRootBalancing<Scalar> out;
  out.hsv.assign(sigma.data(), sigma.data() + sigma.size());
  const Real floor = out.hsv.empty() ? Real(0) : out.hsv.front() * relative_floor;
  while (out.rank < sigma.size() && sigma(out.rank) > floor) ++out.rank;
  const Eigen::Index k = out.rank;
  out.t_left = u.leftCols(k).adjoint() * lo.adjoint();
  out.t_right = lc * v.leftCols(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Scalar s = Scalar(Real(1) / sqrt(sigma(i)));
    out.t_left.row(i) *= s;
    out.t_right.col(i) *= s;
  }
  return out;
}

struct HsvSpectrum {
  // Descending; one per state dimension.
  std::vector<double> values;
  // Number of leading values above the numerical noise floor; the rest are
  // flagged and excluded from the balanced system.
  std::size_t resolved = 0;
};

struct BalancedRealization {
  Realization system;
  HsvSpectrum spectrum;
};

inline constexpr double kDoubleNoiseFloor = 1.5e-8;

namespace detail {

// For modal poles closed under conjugation, the map z = M x to real
// coordinates: z = x on real poles, (Re x_i, Im x_i) on a pair (i, j).
// Empty when some pole has no conjugate partner.
inline std::optional<MatrixC> real_coordinates(const VectorC& poles) {
  const Eigen::Index n = poles.size();
  MatrixC m = MatrixC::Zero(n, n);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    const cd p = poles(i);
    if (p.imag() == 0.0) {
      m(i, i) = 1.0;
      used[static_cast<std::size_t>(i)] = true;
      continue;
    }
    Eigen::Index j = -1;
    for (Eigen::Index k = i + 1; k < n && j < 0; ++k)
      if (!used[static_cast<std::size_t>(k)] && std::abs(poles(k) - std::conj(p)) <= 1e-12 * std::abs(p)) j = k;
    if (j < 0) return std::nullopt;
    m(i, i) = 0.5;
    m(i, j) = 0.5;
    m(j, i) = cd(0.0, -0.5);
    m(j, j) = cd(0.0, 0.5);
    used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = true;
  }
  return m;
}

}  // namespace detail

inline BalancedRealization balance(const Realization& f, double relative_floor = kDoubleNoiseFloor) {
  require(f.order() > 0, "cannot balance an empty realization");
  const GramianPair g = gramians(f);
  if (f.is_modal()) {
    if (const auto m = detail::real_coordinates(f.poles())) {
      // Balance the equivalent real system in real arithmetic so the reduced
      // model stays real.
      const MatrixC minv = m->inverse();
      const Eigen::MatrixXd az = (*m * f.poles().asDiagonal() * minv).real();
      const Eigen::VectorXd bz = (*m * f.b()).real();
      const Eigen::RowVectorXd cz = (f.c() * minv).real();
      const Eigen::MatrixXd wc = (*m * g.wc * m->adjoint()).real();
      const Eigen::MatrixXd wo = (minv.adjoint() * g.wo * minv).real();
      const auto sr = square_root_balance<double>(wc, wo, relative_floor);
      BalancedRealization out{Realization(MatrixC(sr.t_left * az * sr.t_right), VectorC(sr.t_left * bz),
                                          RowVectorC(cz * sr.t_right)),
                              {}};
      out.spectrum.values = sr.hsv;
      out.spectrum.resolved = static_cast<std::size_t>(sr.rank);
      return out;
    }
  }
  const auto sr = square_root_balance<cd>(g.wc, g.wo, relative_floor);
  const MatrixC ar = f.is_modal() ? MatrixC(sr.t_left * f.poles().asDiagonal() * sr.t_right)
                                  : MatrixC(sr.t_left * f.a() * sr.t_right);
  BalancedRealization out{Realization(ar, sr.t_left * f.b(), f.c() * sr.t_right), {}};
  out.spectrum.values = sr.hsv;
  out.spectrum.resolved = static_cast<std::size_t>(sr.rank);
  return out;
}

inline std::vector<double> hankel_singular_values(const Realization& f) { return balance(f).spectrum.values; }

struct TruncationPolicy {
  enum class Kind { HMin, Order } kind = Kind::HMin;
  double h_min = 4e-5;
  Eigen::Index order = 0;

  static TruncationPolicy threshold(double h) {
    require(h >= 0.0 && std::isfinite(h), "h_min must be a finite nonnegative number");
    return {Kind::HMin, h, 0};
  }
  static TruncationPolicy fixed_order(Eigen::Index k) {
    require(k >= 1, "truncation order must be at least 1");
    return {Kind::Order, 0.0, k};
  }
};

struct TruncationResult {
  Realization system;
  // 2 Σ of the discarded Hankel singular values.
  double error_bound = 0.0;
  Eigen::Index order_before = 0;
  Eigen::Index order_after = 0;
};

// Keeps the leading balanced dimensions allowed by the policy.
inline TruncationResult truncate(const BalancedRealization& b, const TruncationPolicy& policy) {
  const auto& h = b.spectrum.values;
  const auto available = static_cast<Eigen::Index>(b.spectrum.resolved);
  Eigen::Index k = 0;
  if (policy.kind == TruncationPolicy::Kind::HMin) {
    while (k < available && h[static_cast<std::size_t>(k)] >= policy.h_min) ++k;
  } else {
    k = std::min(policy.order, available);
  }
  if (k == 0)
    throw InvalidInput("truncation policy removes all dimensions (largest HSV " +
                       short_number(h.empty() ? 0.0 : h.front()) + ")");
  TruncationResult out;
  out.order_before = static_cast<Eigen::Index>(h.size());
  out.order_after = k;
  for (std::size_t i = static_cast<std::size_t>(k); i < h.size(); ++i) out.error_bound += 2.0 * h[i];
  const MatrixC a = b.system.a();
  out.system = Realization(a.topLeftCorner(k, k), b.system.b().head(k), b.system.c().head(k));
  return out;
}

// Balance, truncate and return to modal form when the eigenbasis allows.
inline TruncationResult balanced_truncation(const Realization& f, const TruncationPolicy& policy) {
  TruncationResult r = truncate(balance(f), policy);
  r.order_before = f.order();
  r.system.to_modal();
  return r;
}

}  // namespace qconcat
