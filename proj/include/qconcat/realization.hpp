#pragma once

// Single-input single-output state-space realizations (A, B, C) with impulse
// response y(τ) = C e^{Aτ} B, stored over complex doubles. A realization is
// modal when A is diagonal; modal form is closed under product, sum and scale.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"

#include "qconcat/concatenation.hpp"
#include "qconcat/error.hpp"
#include "qconcat/exp_series.hpp"
#include "qconcat/polynomial.hpp"

namespace qconcat {

using cd = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;
using RowVectorC = Eigen::RowVectorXcd;

class Realization {
 public:
  Realization() = default;

  // Dense realization.
  Realization(MatrixC a, VectorC b, RowVectorC c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    require(a_.rows() == a_.cols(), "A must be square");
    require(b_.size() == a_.rows() && c_.size() == a_.rows(), "B and C must match the order of A");
    modal_ = a_.isDiagonal(0.0);
    if (modal_) poles_ = a_.diagonal();
  }

  // Modal realization diag(poles).
  static Realization modal(VectorC poles, VectorC b, RowVectorC c) {
    require(b.size() == poles.size() && c.size() == poles.size(), "B and C must match the number of poles");
    Realization r;
    r.poles_ = std::move(poles);
    r.b_ = std::move(b);
    r.c_ = std::move(c);
    r.modal_ = true;
    return r;
  }

  // A = diag(-a_i), B = (b_i), C = (1, ..., 1).
  static Realization from_series(const ExpSeries& s) {
    require(!s.empty(), "cannot realize the zero series");
    const auto n = static_cast<Eigen::Index>(s.term_count());
    VectorC poles(n), b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& t = s.terms()[static_cast<std::size_t>(i)];
      require(t.rate > 0, "series rates must be positive for a stable realization");
      poles(i) = -static_cast<double>(t.rate);
      b(i) = t.coefficient.get_d();
    }
    return modal(std::move(poles), std::move(b), RowVectorC::Ones(n));
  }

  Eigen::Index order() const { return b_.size(); }
  bool is_modal() const { return modal_; }
  const VectorC& poles() const {
    require(modal_, "poles are stored only for modal realizations");
    return poles_;
  }
  const VectorC& b() const { return b_; }
  const RowVectorC& c() const { return c_; }

  MatrixC a() const {
    if (modal_) return poles_.asDiagonal();
    return a_;
  }

  VectorC eigenvalues() const {
    if (modal_) return poles_;
    return Eigen::ComplexEigenSolver<MatrixC>(a_, false).eigenvalues();
  }

  double spectral_abscissa() const {
    const VectorC ev = eigenvalues();
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) m = std::max(m, ev(i).real());
    return m;
  }

  bool is_stable() const { return order() == 0 || spectral_abscissa() < 0.0; }

  // Diagonalizes a dense realization. Returns false, leaving *this unchanged,
  // when the eigenvector basis has condition number above max_condition.
  bool to_modal(double max_condition = 1e8) {
    if (modal_) return true;
    MatrixC v;
    VectorC ev;
    // A real A gives exactly conjugate eigenpairs from the real solver.
    if (a_.imag().isZero(0.0)) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(a_.real());
      if (es.info() != Eigen::Success) return false;
      v = es.eigenvectors();
      ev = es.eigenvalues();
    } else {
      Eigen::ComplexEigenSolver<MatrixC> es(a_);
      if (es.info() != Eigen::Success) return false;
      v = es.eigenvectors();
      ev = es.eigenvalues();
    }
    Eigen::JacobiSVD<MatrixC> svd(v);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > max_condition) return false;
    Eigen::PartialPivLU<MatrixC> lu(v);
    const VectorC bm = lu.solve(b_);
    const RowVectorC cm = c_ * v;
    poles_ = ev;
    b_ = cm.transpose().cwiseProduct(bm);
    c_ = RowVectorC::Ones(poles_.size());
    a_.resize(0, 0);
    modal_ = true;
    make_conjugate_symmetric();
    return true;
  }

  // The represented functions are real: snap nearly real poles onto the real
  // axis with real residues, and average near-conjugate pairs.
  void make_conjugate_symmetric(double tolerance = 1e-6) {
    if (!modal_) return;
    const Eigen::Index n = order();
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
      const cd p = poles_(i);
      if (std::abs(p.imag()) <= 1e-9 * std::max(1.0, std::abs(p))) {
        poles_(i) = p.real();
        b_(i) = c_(i) * b_(i);
        b_(i) = b_(i).real();
        c_(i) = 1.0;
        done[static_cast<std::size_t>(i)] = true;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)] || poles_(i).imag() < 0.0) continue;
      Eigen::Index best = -1;
      double gap = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || done[static_cast<std::size_t>(j)] || poles_(j).imag() >= 0.0) continue;
        const double d = std::abs(poles_(j) - std::conj(poles_(i)));
        if (best < 0 || d < gap) best = j, gap = d;
      }
      if (best < 0 || gap > tolerance * std::max(1.0, std::abs(poles_(i)))) continue;
      const cd p = 0.5 * (poles_(i) + std::conj(poles_(best)));
      const cd r = 0.5 * (c_(i) * b_(i) + std::conj(c_(best) * b_(best)));
      poles_(i) = p;
      poles_(best) = std::conj(p);
      b_(i) = r;
      b_(best) = std::conj(r);
      c_(i) = c_(best) = 1.0;
      done[static_cast<std::size_t>(i)] = done[static_cast<std::size_t>(best)] = true;
    }
  }

  Realization as_dense() const { return Realization(a(), b_, c_); }

  // Impulse response at τ. Imaginary residue above 1e-7 (relative to the
  // magnitude of the summed terms) raises NumericalFailure.
  double evaluate(double tau) const {
    require(tau >= 0.0 && std::isfinite(tau), "realizations are evaluated at τ >= 0");
    if (modal_) return real_part(modal_response(poles_, b_, c_, tau));
    Realization m = *this;
    if (m.to_modal()) return real_part(modal_response(m.poles_, m.b_, m.c_, tau));
    const MatrixC e = (a_ * cd(tau, 0.0)).exp();
    const cd y = (c_ * e * b_)(0, 0);
    return real_part({y, std::abs(y) + 1.0});
  }

  // H(s) = C (sI - A)^{-1} B.
  cd transfer(cd s) const {
    if (modal_) {
      cd total = 0.0;
      for (Eigen::Index i = 0; i < order(); ++i) total += c_(i) * b_(i) / (s - poles_(i));
      return total;
    }
    const MatrixC m = s * MatrixC::Identity(order(), order()) - a_;
    return (c_ * m.partialPivLu().solve(b_))(0, 0);
  }

 private:
  struct Response {
    cd value;
    double magnitude;
  };

  static Response modal_response(const VectorC& poles, const VectorC& b, const RowVectorC& c, double tau) {
    cd total = 0.0;
    double magnitude = 0.0;
    for (Eigen::Index i = 0; i < poles.size(); ++i) {
      const cd term = c(i) * b(i) * std::exp(poles(i) * tau);
      total += term;
      magnitude += std::abs(term);
    }
    return {total, magnitude};
  }

  static double real_part(const Response& r) {
    if (std::abs(r.value.imag()) > 1e-7 * std::max(1.0, r.magnitude))
      throw NumericalFailure("impulse response has imaginary part " + short_number(r.value.imag()));
    return r.value.real();
  }

  MatrixC a_;
  VectorC poles_;
  VectorC b_;
  RowVectorC c_;
  bool modal_ = false;
};

// f(τ)g(τ): (A_f ⊗ 1 + 1 ⊗ A_g, B_f ⊗ B_g, C_f ⊗ C_g).
inline Realization product(const Realization& f, const Realization& g) {
  const Eigen::Index nf = f.order(), ng = g.order();
  VectorC b(nf * ng);
  RowVectorC c(nf * ng);
  for (Eigen::Index i = 0; i < nf; ++i)
    for (Eigen::Index j = 0; j < ng; ++j) {
      b(i * ng + j) = f.b()(i) * g.b()(j);
      c(i * ng + j) = f.c()(i) * g.c()(j);
    }
  if (f.is_modal() && g.is_modal()) {
    VectorC poles(nf * ng);
    for (Eigen::Index i = 0; i < nf; ++i)
      for (Eigen::Index j = 0; j < ng; ++j) poles(i * ng + j) = f.poles()(i) + g.poles()(j);
    return Realization::modal(std::move(poles), std::move(b), std::move(c));
  }
  const MatrixC a = Eigen::kroneckerProduct(f.a(), MatrixC::Identity(ng, ng)).eval() +
                    Eigen::kroneckerProduct(MatrixC::Identity(nf, nf), g.a()).eval();
  return Realization(a, std::move(b), std::move(c));
}

// f(τ) + g(τ): block-diagonal A, stacked B, concatenated C.
inline Realization sum(const Realization& f, const Realization& g) {
  const Eigen::Index nf = f.order(), ng = g.order();
  VectorC b(nf + ng);
  RowVectorC c(nf + ng);
  b << f.b(), g.b();
  c << f.c(), g.c();
  if (f.is_modal() && g.is_modal()) {
    VectorC poles(nf + ng);
    poles << f.poles(), g.poles();
    return Realization::modal(std::move(poles), std::move(b), std::move(c));
  }
  MatrixC a = MatrixC::Zero(nf + ng, nf + ng);
  a.topLeftCorner(nf, nf) = f.a();
  a.bottomRightCorner(ng, ng) = g.a();
  return Realization(std::move(a), std::move(b), std::move(c));
}

// α f(τ): (A, B, α C).
inline Realization scale(double alpha, const Realization& f) {
  if (f.is_modal()) return Realization::modal(f.poles(), f.b(), f.c() * cd(alpha, 0.0));
  return Realization(f.a(), f.b(), f.c() * cd(alpha, 0.0));
}

// (T A T^{-1}, T B, C T^{-1}).
inline Realization similarity(const Realization& f, const MatrixC& t) {
  Eigen::PartialPivLU<MatrixC> lu(t);
  const MatrixC t_inv = lu.inverse();
  return Realization(t * f.a() * t_inv, t * f.b(), f.c() * t_inv);
}

using RealizationTriple = std::array<Realization, 3>;

// Each monomial is realized by left-to-right products of its factors (x
// factors, then y, then z) and the scaled monomials are summed in graded-lex
// order.
inline Realization apply_polynomial(const Polynomial3& p, const RealizationTriple& in) {
  require(!p.is_zero() && !p.has_constant_term(), "polynomial must be nonzero without constant term");
  Realization total;
  bool have_total = false;
  for (const auto& [e, coefficient] : p.terms()) {
    Realization mono;
    bool started = false;
    for (int v = 0; v < 3; ++v)
      for (unsigned k = 0; k < e[v]; ++k) {
        mono = started ? product(mono, in[v]) : in[v];
        started = true;
      }
    Realization term = scale(coefficient.get_d(), mono);
    total = have_total ? sum(total, term) : term;
    have_total = true;
  }
  return total;
}

inline RealizationTriple apply_polynomial(const DiagonalPolynomialMap& m, const RealizationTriple& in) {
  return {apply_polynomial(m.p[0], in), apply_polynomial(m.p[1], in), apply_polynomial(m.p[2], in)};
}

// Merges coincident poles and drops negligible residues of a modal
// realization. For distinct poles with nonzero residues the result is minimal.
inline Realization minimal_realization(const Realization& f, double pole_tolerance = 1e-9,
                                       double residue_tolerance = 1e-12) {
  require(f.is_modal(), "minimal_realization needs a modal realization");
  struct Mode {
    cd pole;
    cd residue;
    // Σ |residue| of the merged contributions: the scale of cancellation error.
    double magnitude;
  };
  std::vector<Mode> modes;
  for (Eigen::Index i = 0; i < f.order(); ++i) {
    const cd r = f.c()(i) * f.b()(i);
    modes.push_back({f.poles()(i), r, std::abs(r)});
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.pole.real() != b.pole.real()) return a.pole.real() > b.pole.real();
    return a.pole.imag() < b.pole.imag();
  });
  std::vector<Mode> merged;
  for (const auto& m : modes) {
    if (!merged.empty() && std::abs(merged.back().pole - m.pole) <= pole_tolerance * std::max(1.0, std::abs(m.pole))) {
      merged.back().residue += m.residue;
      merged.back().magnitude += m.magnitude;
    } else {
      merged.push_back(m);
    }
  }
  // A residue is zero when it is lost in the rounding of its own merge.
  std::vector<Mode> kept;
  for (const auto& m : merged)
    if (std::abs(m.residue) > residue_tolerance * m.magnitude) kept.push_back(m);
  const auto n = static_cast<Eigen::Index>(kept.size());
  VectorC poles(n), b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    poles(i) = kept[static_cast<std::size_t>(i)].pole;
    b(i) = kept[static_cast<std::size_t>(i)].residue;
  }
  return Realization::modal(std::move(poles), std::move(b), RowVectorC::Ones(n));
}

namespace detail {

inline nlohmann::json complex_json(cd v) {
  if (v.imag() == 0.0) return v.real();
  return nlohmann::json::array({v.real(), v.imag()});
}

inline cd complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2, "complex entries are numbers or [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline nlohmann::json to_json(const Realization& r) {
  const MatrixC a = r.a();
  nlohmann::json ja = nlohmann::json::array(), jb = nlohmann::json::array(), jc = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.order(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < r.order(); ++j) row.push_back(detail::complex_json(a(i, j)));
    ja.push_back(row);
    jb.push_back(detail::complex_json(r.b()(i)));
    jc.push_back(detail::complex_json(r.c()(i)));
  }
  return {{"order", r.order()}, {"modal", r.is_modal()}, {"A", ja}, {"B", jb}, {"C", jc}};
}

inline Realization realization_from_json(const nlohmann::json& j) {
  const auto& ja = j.at("A");
  const auto& jb = j.at("B");
  const auto& jc = j.at("C");
  const auto n = static_cast<Eigen::Index>(jb.size());
  require(ja.size() == jb.size() && jc.size() == jb.size(), "realization JSON has inconsistent sizes");
  MatrixC a(n, n);
  VectorC b(n);
  RowVectorC c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(ja[i].size() == jb.size(), "A must be square");
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = detail::complex_from_json(ja[i][k]);
    b(i) = detail::complex_from_json(jb[i]);
    c(i) = detail::complex_from_json(jc[i]);
  }
  return Realization(std::move(a), std::move(b), std::move(c));
}

}  // namespace qconcat
