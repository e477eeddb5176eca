#pragma once

// Concatenation maps Ω: G ↦ G̃ in three forms. ConcatMap is the general
// numeric contraction over Pauli-basis coefficients; DiagonalPolynomialMap is
// the exact polynomial action on diagonal channels, which also acts on exact
// exponential series.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "qconcat/channel.hpp"
#include "qconcat/exp_series.hpp"
#include "qconcat/polynomial.hpp"
#include "qconcat/stabilizer_code.hpp"

namespace qconcat {

// A stack of code stages, outermost first. Each physical qubit of an outer
// stage is a logical qubit of the next stage in.
class ConcatMap {
 public:
  static ConcatMap from_code(const StabilizerCode& code) { return from_code(code, recovery_table(code)); }

  static ConcatMap from_code(const StabilizerCode& code, const RecoveryTable& table) {
    ConcatMap m;
    m.name_ = code.name();
    m.stages_.push_back(alpha_beta(code, table));
    return m;
  }

  // outer(inner(G)).
  static ConcatMap compose(const ConcatMap& outer, const ConcatMap& inner) {
    ConcatMap m;
    m.name_ = outer.name_ + "(" + inner.name_ + ")";
    m.stages_ = outer.stages_;
    m.stages_.insert(m.stages_.end(), inner.stages_.begin(), inner.stages_.end());
    return m;
  }

  const std::string& name() const { return name_; }
  std::size_t stage_count() const { return stages_.size(); }
  const CoefficientTables& stage(std::size_t k) const { return stages_.at(k); }

  // Physical qubits at the innermost level.
  std::size_t n() const {
    std::size_t total = 1;
    for (const auto& s : stages_) total *= s.n;
    return total;
  }

  // β^σ_ν α^σ'_μ for a single-stage map.
  Rational coefficient(Pauli sigma, Pauli sigma_prime, const std::string& mu, const std::string& nu) const {
    require(stages_.size() == 1, "coefficients are exposed for single-stage maps only");
    const auto& t = stages_.front();
    auto a = t.alpha[pauli_index(sigma_prime)].find(mu);
    auto b = t.beta[pauli_index(sigma)].find(nu);
    if (a == t.alpha[pauli_index(sigma_prime)].end() || b == t.beta[pauli_index(sigma)].end()) return 0;
    return a->second * b->second;
  }

  // inner has one channel (used on every qubit) or n() channels in qubit order.
  QubitChannel apply(const std::vector<QubitChannel>& inner) const {
    const std::size_t total = n();
    require(inner.size() == 1 || inner.size() == total,
            name_ + " expects 1 or " + std::to_string(total) + " inner channels, got " + std::to_string(inner.size()));
    std::vector<Eigen::Matrix4d> level;
    level.reserve(total);
    for (std::size_t q = 0; q < total; ++q) level.push_back(inner[inner.size() == 1 ? 0 : q].matrix());
    for (auto stage = stages_.rbegin(); stage != stages_.rend(); ++stage) {
      std::vector<Eigen::Matrix4d> next;
      for (std::size_t block = 0; block < level.size(); block += stage->n) {
        std::vector<Eigen::Matrix4d> factors(level.begin() + static_cast<std::ptrdiff_t>(block),
                                             level.begin() + static_cast<std::ptrdiff_t>(block + stage->n));
        next.push_back(contract(*stage, factors));
      }
      level = std::move(next);
    }
    return QubitChannel(level.front());
  }

  DiagonalChannel apply(const DiagonalChannel& inner) const {
    const auto g = apply(std::vector<QubitChannel>{inner.to_channel()}).matrix();
    return {g(1, 1), g(2, 2), g(3, 3)};
  }

 private:
  std::string name_;
  std::vector<CoefficientTables> stages_;
};

inline QubitChannel apply_numeric(const ConcatMap& map, const std::vector<QubitChannel>& inner) { return map.apply(inner); }

struct DiagonalPolynomialMap {
  std::string name;
  // Components for x, y, z in that order.
  std::array<Polynomial3, 3> p;

  static DiagonalPolynomialMap identity() {
    return {"identity", {Polynomial3::variable(0), Polynomial3::variable(1), Polynomial3::variable(2)}};
  }

  const Polynomial3& component(Pauli sigma) const {
    require(sigma != Pauli::I, "the identity component of a diagonal map is fixed");
    return p[pauli_index(sigma) - 1];
  }

  bool is_identity() const { return p == identity().p; }

  DiagonalChannel operator()(const DiagonalChannel& d) const {
    return {p[0].evaluate(d.x, d.y, d.z), p[1].evaluate(d.x, d.y, d.z), p[2].evaluate(d.x, d.y, d.z)};
  }

  void validate() const {
    for (int k = 0; k < 3; ++k) {
      require(!p[k].has_constant_term(), name + ": component " + "xyz"[k] + " has a constant term");
      require(p[k].evaluate(Rational(1), Rational(1), Rational(1)) == 1,
              name + ": component " + std::string(1, "xyz"[k]) + " does not fix the identity channel");
    }
  }
};

// A diagonal map applied as a sequence of stages, first stage innermost.
// Iterating stage by stage keeps numeric evaluation at the low degree of each
// stage instead of the expanded composite.
struct StagedMap {
  std::string name;
  std::vector<DiagonalPolynomialMap> stages;

  DiagonalChannel operator()(DiagonalChannel d) const {
    for (const auto& s : stages) d = s(d);
    return d;
  }

  DiagonalPolynomialMap expanded() const;

  StagedMap squared() const {
    StagedMap sq{name + "^2", stages};
    sq.stages.insert(sq.stages.end(), stages.begin(), stages.end());
    return sq;
  }
};

// Diagonal stabilizer formula:
//   G̃_σσ = (1/|S|) Σ_i f_iσ x^{w_X(S_i σ̄)} y^{w_Y(S_i σ̄)} z^{w_Z(S_i σ̄)}.
// The phase of S_i σ̄ enters D_σ and E_σ alike and cancels.
inline DiagonalPolynomialMap diagonal_polynomials(const StabilizerCode& code, const RecoveryTable& table) {
  const auto group = code.stabilizer_group();
  const auto dec = decoding_ops(code, table);
  const Rational weight(1, static_cast<unsigned long>(code.group_order()));
  DiagonalPolynomialMap m{code.name(), {}};
  for (Pauli sigma : kNonIdentityPaulis) {
    const PauliOperator logical = code.logical(sigma);
    const auto& f = dec.f[pauli_index(sigma)];
    Polynomial3& out = m.p[pauli_index(sigma) - 1];
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (f[i] == 0) continue;
      const PauliOperator s = group[i] * logical;
      out.add_term({static_cast<unsigned>(sigma_weight(s, Pauli::X)), static_cast<unsigned>(sigma_weight(s, Pauli::Y)),
                    static_cast<unsigned>(sigma_weight(s, Pauli::Z))},
                   weight * f[i]);
    }
  }
  return m;
}

inline DiagonalPolynomialMap diagonal_polynomials(const StabilizerCode& code) {
  return diagonal_polynomials(code, recovery_table(code));
}

// outer(inner(·)).
inline DiagonalPolynomialMap compose(const DiagonalPolynomialMap& outer, const DiagonalPolynomialMap& inner) {
  std::array<PowerCache<Polynomial3>, 3> caches{PowerCache<Polynomial3>(inner.p[0]), PowerCache<Polynomial3>(inner.p[1]),
                                                PowerCache<Polynomial3>(inner.p[2])};
  DiagonalPolynomialMap m{outer.name + "(" + inner.name + ")", {}};
  for (int k = 0; k < 3; ++k) m.p[k] = substitute(outer.p[k], caches);
  return m;
}

inline DiagonalPolynomialMap squared(const DiagonalPolynomialMap& m) {
  DiagonalPolynomialMap sq = compose(m, m);
  sq.name = m.name + "^2";
  return sq;
}

inline DiagonalPolynomialMap StagedMap::expanded() const {
  require(!stages.empty(), "a staged map needs at least one stage");
  DiagonalPolynomialMap m = stages.front();
  for (std::size_t k = 1; k < stages.size(); ++k) m = compose(stages[k], m);
  m.name = name;
  return m;
}

using SeriesTriple = std::array<ExpSeries, 3>;

// Exact action on series-valued channels [x̃(τ), ỹ(τ), z̃(τ)]. Powers of the
// inputs are shared across the three output components.
inline SeriesTriple apply_to_series(const DiagonalPolynomialMap& m, const SeriesTriple& in) {
  std::array<PowerCache<ExpSeries>, 3> caches{PowerCache<ExpSeries>(in[0]), PowerCache<ExpSeries>(in[1]),
                                              PowerCache<ExpSeries>(in[2])};
  SeriesTriple out;
  for (int k = 0; k < 3; ++k) out[k] = substitute(m.p[k], caches);
  return out;
}

// Concatenation schemes. For shor and shor_prime the default is the coherent
// per-block scheme (phaseflip outside bitflip, each stage corrected on its
// own); `direct` decodes the explicit 9-qubit code with a single recovery.
inline bool has_block_scheme(const std::string& name) { return name == "shor" || name == "shor_prime"; }

inline std::vector<StabilizerCode> scheme_stages(const std::string& name) {
  if (name == "shor") return {builtin("phaseflip"), builtin("bitflip")};
  if (name == "shor_prime") return {swap_logicals(builtin("phaseflip"), "phaseflip_swapped"), builtin("bitflip")};
  return {builtin(name)};
}

// Stages of a scheme, inner stage first.
inline StagedMap scheme_staged(const StabilizerCode& code, bool direct = false) {
  StagedMap m{code.name(), {}};
  if (direct || !has_block_scheme(code.name())) {
    m.stages.push_back(diagonal_polynomials(code));
    return m;
  }
  const auto codes = scheme_stages(code.name());
  for (auto it = codes.rbegin(); it != codes.rend(); ++it) m.stages.push_back(diagonal_polynomials(*it));
  return m;
}

inline DiagonalPolynomialMap scheme_polynomials(const StabilizerCode& code, bool direct = false) {
  return scheme_staged(code, direct).expanded();
}

inline ConcatMap scheme_concat_map(const StabilizerCode& code, bool direct = false) {
  if (direct || !has_block_scheme(code.name())) return ConcatMap::from_code(code);
  const auto stages = scheme_stages(code.name());
  return ConcatMap::compose(ConcatMap::from_code(stages[0]), ConcatMap::from_code(stages[1]));
}

// Exact series σ̃_ℓ(τ), ℓ = 0..levels, from e^{-τ}, applying the scheme
// stage by stage. With `per_stage`, every intermediate stage is recorded too.
inline std::vector<SeriesTriple> scheme_series(const StabilizerCode& code, unsigned levels, bool per_stage = false) {
  const StagedMap m = scheme_staged(code);
  const ExpSeries u = ExpSeries::exponential(1);
  std::vector<SeriesTriple> out{{u, u, u}};
  SeriesTriple s = out.back();
  for (unsigned l = 0; l < levels; ++l) {
    for (std::size_t k = 0; k < m.stages.size(); ++k) {
      s = apply_to_series(m.stages[k], s);
      if (per_stage || k + 1 == m.stages.size()) out.push_back(s);
    }
  }
  return out;
}

inline nlohmann::json to_json(const Polynomial3& p) {
  nlohmann::json monomials = nlohmann::json::array();
  for (const auto& [e, c] : p.terms())
    monomials.push_back({{"ex", e[0]}, {"ey", e[1]}, {"ez", e[2]}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  return monomials;
}

inline nlohmann::json to_json(const DiagonalPolynomialMap& m) {
  nlohmann::json out = nlohmann::json::array();
  for (int k = 0; k < 3; ++k) out.push_back({{"sigma", std::string(1, "XYZ"[k])}, {"monomials", to_json(m.p[k])}});
  return out;
}

inline DiagonalPolynomialMap polynomial_map_from_json(const nlohmann::json& j, std::string name = "custom") {
  require(j.is_array() && j.size() == 3, "polynomial map JSON must list three components");
  DiagonalPolynomialMap m{std::move(name), {}};
  for (const auto& comp : j) {
    const std::string sigma = comp.at("sigma").get<std::string>();
    require(sigma == "X" || sigma == "Y" || sigma == "Z", "unknown component: " + sigma);
    Polynomial3& p = m.p[sigma == "X" ? 0 : sigma == "Y" ? 1 : 2];
    for (const auto& mono : comp.at("monomials")) {
      Rational c;
      require(c.set_str(mono.at("num").get<std::string>() + "/" + mono.at("den").get<std::string>(), 10) == 0,
              "malformed monomial coefficient");
      require(c.get_den() != 0, "zero denominator in polynomial JSON");
      c.canonicalize();
      p.add_term({mono.at("ex").get<unsigned>(), mono.at("ey").get<unsigned>(), mono.at("ez").get<unsigned>()}, c);
    }
  }
  return m;
}

}  // namespace qconcat
