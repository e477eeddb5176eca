#pragma once

// Iterative concatenate-then-reduce pipeline and approximation-error curves.

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qconcat/balanced_truncation.hpp"
#include "qconcat/concatenation.hpp"
#include "qconcat/realization.hpp"
#include "qconcat/threshold.hpp"

namespace qconcat {

inline std::vector<double> linspace(double start, double stop, std::size_t count) {
  require(count >= 2, "a grid needs at least two points");
  require(std::isfinite(start) && std::isfinite(stop) && stop > start, "grid bounds must be finite with stop > start");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = i + 1 == count ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

struct ErrorCurve {
  std::vector<double> tau;
  std::vector<double> exact;
  std::vector<double> approx;
  std::vector<double> delta;
  double max_abs = 0.0;
  // Sign changes of delta, ignoring |delta| below 1e-12.
  int sign_changes = 0;
};

inline ErrorCurve approximation_error(const Realization& approx, const std::vector<double>& exact,
                                      const std::vector<double>& taus) {
  require(exact.size() == taus.size(), "oracle values must match the grid");
  ErrorCurve c;
  c.tau = taus;
  c.exact = exact;
  int last_sign = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double a = approx.evaluate(taus[i]);
    const double d = a - exact[i];
    c.approx.push_back(a);
    c.delta.push_back(d);
    c.max_abs = std::max(c.max_abs, std::abs(d));
    if (std::abs(d) > 1e-12) {
      const int s = d > 0 ? 1 : -1;
      if (last_sign != 0 && s != last_sign) ++c.sign_changes;
      last_sign = s;
    }
  }
  return c;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const ErrorCurve& c) {
  out << "tau,exact,approx,delta\n";
  for (std::size_t i = 0; i < c.tau.size(); ++i)
    out << format_number(c.tau[i]) << ',' << format_number(c.exact[i]) << ',' << format_number(c.approx[i]) << ','
        << format_number(c.delta[i]) << '\n';
}

struct ReductionOptions {
  unsigned levels = 4;
  double h_min = 4e-5;
  Eigen::Index order_cap = 5000;
  double grid_start = 0.0;
  double grid_stop = 1.5;
  std::size_t grid_count = 300;
};

struct StageRecord {
  unsigned level = 0;
  std::string stage;
  std::array<Eigen::Index, 3> order_before{};
  std::array<Eigen::Index, 3> order_after{};
  std::array<double, 3> error_bound{};
  std::array<std::vector<double>, 3> hsv;
};

struct Crossing {
  unsigned level = 0;
  double tau = 0.0;
  double value = 0.0;
};

struct ReductionReport {
  std::string scheme;
  double h_min = 0.0;
  std::vector<StageRecord> stages;
  // Index ℓ = 0..levels.
  std::vector<RealizationTriple> realizations;
  std::vector<std::array<Eigen::Index, 3>> orders;
  std::vector<std::array<double, 3>> max_error;
  std::vector<std::array<ErrorCurve, 3>> curves;
  // Crossings of successive levels ℓ, ℓ+1 for x and z; approximate and oracle.
  std::array<std::vector<Crossing>, 2> crossings_approx;
  std::array<std::vector<Crossing>, 2> crossings_exact;
};

namespace detail {

inline std::optional<Crossing> first_crossing(const std::vector<double>& taus, const std::vector<double>& f,
                                              const std::vector<double>& g, unsigned level) {
  // Skip τ = 0, where all levels agree.
  for (std::size_t i = 2; i < taus.size(); ++i) {
    const double d0 = f[i - 1] - g[i - 1], d1 = f[i] - g[i];
    if ((d0 < 0) != (d1 < 0)) {
      const double w = d0 / (d0 - d1);
      return Crossing{level, taus[i - 1] + w * (taus[i] - taus[i - 1]), f[i - 1] + w * (f[i] - f[i - 1])};
    }
  }
  return std::nullopt;
}

}  // namespace detail

// One 3-qubit stage: apply the map, then reduce every component.
inline RealizationTriple reduce_stage(const DiagonalPolynomialMap& stage, const RealizationTriple& in, double h_min,
                                      Eigen::Index order_cap, StageRecord& record) {
  RealizationTriple out;
  for (int c = 0; c < 3; ++c) {
    Realization r = apply_polynomial(stage.p[c], in);
    record.order_before[c] = r.order();
    if (r.order() > order_cap)
      throw NumericalFailure(stage.name + ": intermediate order " + std::to_string(r.order()) + " exceeds the cap " +
                             std::to_string(order_cap));
    if (h_min == 0.0 && r.is_modal()) {
      out[c] = minimal_realization(r);
    } else {
      const BalancedRealization b = balance(r);
      record.hsv[c] = b.spectrum.values;
      TruncationResult t = truncate(b, TruncationPolicy::threshold(h_min));
      t.system.to_modal();
      record.error_bound[c] = t.error_bound;
      out[c] = std::move(t.system);
    }
    record.order_after[c] = out[c].order();
  }
  return out;
}

namespace detail {

inline std::vector<double> oracle_component(const std::vector<std::vector<DiagonalChannel>>& oracle, unsigned level,
                                            int component) {
  std::vector<double> v(oracle[level].size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = oracle[level][i].component(kNonIdentityPaulis[component]);
  return v;
}

inline void record_level(ReductionReport& report, const RealizationTriple& current,
                         const std::vector<std::vector<DiagonalChannel>>& oracle, unsigned level,
                         const std::vector<double>& taus) {
  report.realizations.push_back(current);
  std::array<Eigen::Index, 3> orders{};
  std::array<double, 3> errors{};
  std::array<ErrorCurve, 3> curves;
  for (int c = 0; c < 3; ++c) {
    orders[c] = current[c].order();
    curves[c] = approximation_error(current[c], oracle_component(oracle, level, c), taus);
    errors[c] = curves[c].max_abs;
  }
  report.orders.push_back(orders);
  report.max_error.push_back(errors);
  report.curves.push_back(std::move(curves));
}

inline void record_crossings(ReductionReport& report, const std::vector<double>& taus) {
  const auto levels = static_cast<unsigned>(report.curves.size()) - 1;
  for (int k = 0; k < 2; ++k) {
    const int c = k == 0 ? 0 : 2;
    for (unsigned l = 1; l < levels; ++l) {
      const auto& a = report.curves[l][c];
      const auto& b = report.curves[l + 1][c];
      if (auto x = first_crossing(taus, a.approx, b.approx, l)) report.crossings_approx[k].push_back(*x);
      if (auto x = first_crossing(taus, a.exact, b.exact, l)) report.crossings_exact[k].push_back(*x);
    }
  }
}

}  // namespace detail

// Stages run inner-first (bitflip, then the outer stage for Shor) within each
// level, reducing after every stage. Errors are measured against numeric
// iteration of the same stages on depolarizing(τ).
inline ReductionReport iterative_reduce(const std::vector<DiagonalPolynomialMap>& stages, const ReductionOptions& opt,
                                        const std::string& scheme = "shor") {
  require(!stages.empty(), "iterative reduction needs at least one stage");
  ReductionReport report;
  report.scheme = scheme;
  report.h_min = opt.h_min;
  const std::vector<double> taus = linspace(opt.grid_start, opt.grid_stop, opt.grid_count);
  const auto oracle = asymptotic_profile(StagedMap{scheme, stages}, taus, opt.levels);

  const Realization u = Realization::modal(VectorC::Constant(1, cd(-1.0, 0.0)), VectorC::Ones(1), RowVectorC::Ones(1));
  RealizationTriple current{u, u, u};
  detail::record_level(report, current, oracle, 0, taus);
  for (unsigned l = 1; l <= opt.levels; ++l) {
    for (const auto& stage : stages) {
      StageRecord rec;
      rec.level = l;
      rec.stage = stage.name;
      current = reduce_stage(stage, current, opt.h_min, opt.order_cap, rec);
      report.stages.push_back(std::move(rec));
    }
    detail::record_level(report, current, oracle, l, taus);
  }
  detail::record_crossings(report, taus);
  return report;
}

// Per-stage maps of a scheme, inner stage first.
inline std::vector<DiagonalPolynomialMap> reduction_stages(const StabilizerCode& code) {
  std::vector<DiagonalPolynomialMap> out;
  if (has_block_scheme(code.name())) {
    const auto codes = scheme_stages(code.name());
    for (auto it = codes.rbegin(); it != codes.rend(); ++it) out.push_back(diagonal_polynomials(*it));
  } else {
    out.push_back(diagonal_polynomials(code));
  }
  return out;
}

inline nlohmann::json to_json(const ReductionReport& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages) {
    nlohmann::json hsv = nlohmann::json::object();
    for (int c = 0; c < 3; ++c) {
      std::vector<double> top(s.hsv[c].begin(), s.hsv[c].begin() + std::min<std::ptrdiff_t>(12, static_cast<std::ptrdiff_t>(s.hsv[c].size())));
      hsv[std::string(1, "xyz"[c])] = top;
    }
    stages.push_back({{"level", s.level}, {"stage", s.stage}, {"order_before", s.order_before},
                      {"order_after", s.order_after}, {"error_bound", s.error_bound}, {"leading_hsv", hsv}});
  }
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t l = 0; l < r.orders.size(); ++l)
    levels.push_back({{"level", l}, {"orders", r.orders[l]}, {"max_error", r.max_error[l]}});
  auto crossings = [](const std::vector<Crossing>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : v) j.push_back({{"levels", {c.level, c.level + 1}}, {"tau", c.tau}, {"value", c.value}});
    return j;
  };
  return {{"scheme", r.scheme},
          {"h_min", r.h_min},
          {"stages", stages},
          {"levels", levels},
          {"crossings", {{"x", {{"approx", crossings(r.crossings_approx[0])}, {"exact", crossings(r.crossings_exact[0])}}},
                         {"z", {{"approx", crossings(r.crossings_approx[1])}, {"exact", crossings(r.crossings_exact[1])}}}}}};
}

}  // namespace qconcat
