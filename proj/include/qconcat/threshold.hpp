#pragma once

// Fixed points, limit behavior and storage thresholds of iterated diagonal
// concatenation maps under depolarizing noise.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qconcat/channel.hpp"
#include "qconcat/concatenation.hpp"
#include "qconcat/error.hpp"
#include "qconcat/polynomial.hpp"
#include "qconcat/rational.hpp"

namespace qconcat {

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "";
}

struct FixedPoint {
  double value;
  double derivative;
  Stability stability;
};

struct FixedPointReport {
  std::vector<FixedPoint> points;
  // Q(v) = v identically.
  bool degenerate = false;
  // The unique unstable fixed point strictly inside (0, 1), if any.
  std::optional<double> interior_unstable;
};

struct FixedPointOptions {
  int cells = 1000;
  double tolerance = 1e-14;
  double marginal_band = 1e-9;
};

namespace detail {

// Shortest round-trip decimal of a double.
inline std::string format_round_trip(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Roots of Q(v) - v on [0, 1]: exact zeros at grid points plus sign-change
// cells refined by bisection.
inline FixedPointReport fixed_points(const Polynomial1& q, const FixedPointOptions& opt = {}) {
  FixedPointReport report;
  const Polynomial1 g = q.minus_identity();
  if (g.is_zero()) {
    report.degenerate = true;
    return report;
  }
  const Polynomial1 dq = q.derivative();
  std::vector<double> roots;
  std::vector<Rational> grid;
  for (int k = 0; k <= opt.cells; ++k) grid.emplace_back(k, opt.cells);
  std::vector<int> sign(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Rational value = g.evaluate(grid[k]);
    sign[k] = sgn(value);
    if (sign[k] == 0) roots.push_back(grid[k].get_d());
  }
  // Bisection in exact rational arithmetic: the sign of Q(v) - v is never
  // corrupted by cancellation in high-degree compositions.
  const Rational tolerance = parse_rational(detail::format_round_trip(opt.tolerance));
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (sign[k] == 0 || sign[k + 1] == 0 || sign[k] == sign[k + 1]) continue;
    Rational lo = grid[k], hi = grid[k + 1];
    bool exact_root = false;
    while (hi - lo > tolerance) {
      const Rational mid = (lo + hi) / 2;
      const int sm = sgn(g.evaluate(mid));
      if (sm == 0) {
        roots.push_back(mid.get_d());
        exact_root = true;
        break;
      }
      (sm == sign[k] ? lo : hi) = mid;
    }
    if (!exact_root) roots.push_back(Rational((lo + hi) / 2).get_d());
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> interior;
  for (double r : roots) {
    const double d = dq.evaluate(parse_rational(detail::format_round_trip(r))).get_d();
    const Stability s = std::abs(std::abs(d) - 1.0) <= opt.marginal_band ? Stability::Marginal
                        : std::abs(d) < 1.0                               ? Stability::Stable
                                                                          : Stability::Unstable;
    report.points.push_back({r, d, s});
    if (s == Stability::Unstable && r > 0.0 && r < 1.0) interior.push_back(r);
  }
  if (interior.size() == 1) report.interior_unstable = interior.front();
  return report;
}

// Limit of iterating a map from depolarizing(τ), per component.
enum class Limit { Zero, One, Undetermined };

struct LimitOptions {
  double convergence = 1e-9;
  double cycle_tolerance = 1e-12;
  int max_iterations = 10000;
};

struct ComponentLimit {
  Limit limit = Limit::Undetermined;
  int iterations = 0;
  // Iterate k agrees with iterate k+2 but not k+1.
  bool period_two = false;
};

inline ComponentLimit iterate_limit(const StagedMap& map, int component, double tau,
                                    const LimitOptions& opt = {}) {
  DiagonalChannel v = depolarizing(tau);
  std::vector<double> history{v.component(kNonIdentityPaulis[component])};
  ComponentLimit out;
  for (int k = 1; k <= opt.max_iterations; ++k) {
    v = map(v);
    const double c = v.component(kNonIdentityPaulis[component]);
    history.push_back(c);
    out.iterations = k;
    const double prev = history[history.size() - 2];
    if (std::abs(c) <= opt.convergence && std::abs(prev) <= opt.convergence) {
      out.limit = Limit::Zero;
      return out;
    }
    if (std::abs(c - 1.0) <= opt.convergence && std::abs(prev - 1.0) <= opt.convergence) {
      out.limit = Limit::One;
      return out;
    }
    if (history.size() >= 3) {
      const double two_back = history[history.size() - 3];
      if (std::abs(c - two_back) <= opt.cycle_tolerance && std::abs(c - prev) > opt.convergence) {
        out.period_two = true;
        return out;
      }
    }
  }
  return out;
}

struct BisectionOptions {
  double lo = 0.0;
  double hi = 10.0;
  double tolerance = 1e-10;
  LimitOptions limit;
};

// Largest τ below which the component's limit is 1, assuming one transition
// from 1 to 0 in [lo, hi].
inline double bisection_threshold(const StagedMap& map, int component, const BisectionOptions& opt = {}) {
  auto classify = [&](double tau) {
    const ComponentLimit r = iterate_limit(map, component, tau, opt.limit);
    if (r.limit == Limit::Undetermined) {
      std::ostringstream msg;
      msg << map.name << ": component " << "xyz"[component] << " has no limit at τ = " << tau
          << (r.period_two ? " (period-2 cycle)" : " (iteration cap reached)");
      throw NumericalFailure(msg.str());
    }
    return r.limit;
  };
  double lo = opt.lo, hi = opt.hi;
  if (classify(lo) != Limit::One) return lo;
  if (classify(hi) != Limit::Zero) {
    std::ostringstream msg;
    msg << map.name << ": component " << "xyz"[component] << " is still protected at τ = " << hi;
    throw NumericalFailure(msg.str());
  }
  while (hi - lo > opt.tolerance) {
    const double mid = 0.5 * (lo + hi);
    Limit l;
    try {
      l = classify(mid);
    } catch (const NumericalFailure& e) {
      std::ostringstream msg;
      msg << e.what() << "; threshold lies in [" << lo << ", " << hi << "]";
      throw NumericalFailure(msg.str());
    }
    (l == Limit::One ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double threshold_probability(double t_star) { return 0.75 * (1.0 - std::exp(-t_star)); }

struct ComponentThreshold {
  double t_star = 0.0;
  double p_star = 0.0;
  // "fixed point" or "bisection".
  std::string method;
  std::optional<double> fixed_point;
};

struct ThresholdReport {
  std::string code;
  // x, y, z.
  std::array<ComponentThreshold, 3> components;
  double p_th = 0.0;
  int period = 1;
  bool degenerate = false;
  std::vector<std::string> notes;
};

inline bool shows_period_two(const StagedMap& map) {
  for (double tau : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5})
    for (int c = 0; c < 3; ++c)
      if (iterate_limit(map, c, tau).period_two) return true;
  return false;
}

inline double pauli_threshold(ThresholdReport& report) {
  double p = 1.0;
  for (auto& c : report.components) {
    c.p_star = threshold_probability(c.t_star);
    p = std::min(p, c.p_star);
  }
  report.p_th = p;
  return p;
}

// Decoupled components use t* = -ln σ* from the interior unstable fixed point;
// coupled components are bisected on τ. A map whose iterates settle into a
// period-2 cycle is analyzed through its square.
inline ThresholdReport storage_thresholds(const StagedMap& input, const BisectionOptions& opt = {}) {
  ThresholdReport report;
  report.code = input.name;
  if (input.expanded().is_identity()) {
    report.degenerate = true;
    report.notes.push_back("identity map: concatenation offers no protection");
    pauli_threshold(report);
    return report;
  }
  StagedMap map = input;
  if (shows_period_two(input)) {
    report.period = 2;
    map = input.squared();
    report.notes.push_back("period-2 limit cycle; thresholds from the squared map");
  }
  const DiagonalPolynomialMap expanded = map.expanded();
  for (int c = 0; c < 3; ++c) {
    auto& out = report.components[c];
    const Polynomial3& p = expanded.p[c];
    if (p.variable_mask() == (1u << c)) {
      const FixedPointReport fp = fixed_points(univariate(p, c));
      if (fp.interior_unstable) {
        out.fixed_point = fp.interior_unstable;
        out.t_star = -std::log(*fp.interior_unstable);
        out.method = "fixed point";
        continue;
      }
    } else {
      report.notes.push_back(std::string("component ") + "XYZ"[c] + " is coupled to other components");
    }
    out.t_star = bisection_threshold(map, c, opt);
    out.method = "bisection";
  }
  pauli_threshold(report);
  return report;
}

inline ThresholdReport storage_thresholds(const DiagonalPolynomialMap& map, const BisectionOptions& opt = {}) {
  return storage_thresholds(StagedMap{map.name, {map}}, opt);
}

// σ̃_ℓ(τ) for ℓ = 0..levels by numeric iteration of the map on depolarizing(τ).
inline std::vector<std::vector<DiagonalChannel>> asymptotic_profile(const StagedMap& map,
                                                                   const std::vector<double>& taus, unsigned levels) {
  std::vector<std::vector<DiagonalChannel>> out(levels + 1, std::vector<DiagonalChannel>(taus.size()));
  for (std::size_t i = 0; i < taus.size(); ++i) {
    DiagonalChannel v = depolarizing(taus[i]);
    out[0][i] = v;
    for (unsigned l = 1; l <= levels; ++l) out[l][i] = v = map(v);
  }
  return out;
}

inline nlohmann::json to_json(const ThresholdReport& r) {
  nlohmann::json comps = nlohmann::json::object();
  for (int c = 0; c < 3; ++c) {
    const auto& t = r.components[c];
    nlohmann::json j = {{"t_star", t.t_star}, {"p_star", t.p_star}, {"method", t.method}};
    if (t.fixed_point) j["fixed_point"] = *t.fixed_point;
    comps[std::string(1, "XYZ"[c])] = j;
  }
  return {{"code", r.code}, {"components", comps}, {"p_th", r.p_th}, {"period", r.period},
          {"degenerate", r.degenerate}, {"notes", r.notes}};
}

inline std::string format_table(const std::vector<ThresholdReport>& reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %8s %8s %8s %8s %7s\n", "code", "t*_X", "t*_Y", "t*_Z", "p_th", "period");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-14s %8.4f %8.4f %8.4f %8.4f %7d\n", r.code.c_str(), r.components[0].t_star,
                  r.components[1].t_star, r.components[2].t_star, r.p_th, r.period);
    out << line;
  }
  return out.str();
}

}  // namespace qconcat
