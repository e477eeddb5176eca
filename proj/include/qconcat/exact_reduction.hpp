#pragma once

// Reduction starting from the exact series of every level instead of the
// iterated pipeline.

#include <string>

#include "qconcat/concatenation.hpp"
#include "qconcat/high_precision.hpp"
#include "qconcat/reduction.hpp"

namespace qconcat {

// Realizations are evaluated in double, which the coefficients of level 3
// and beyond (|b_i| up to 1e70) overwhelm.
inline constexpr unsigned kMaxExactReductionLevel = 2;

// h_min = 0 keeps the minimal realization of each series (order = term count);
// otherwise the series is balanced in MPFR and truncated at h_min.
inline ReductionReport exact_reduce(const StabilizerCode& code, const ReductionOptions& opt) {
  require(opt.levels <= kMaxExactReductionLevel,
          "exact reduction supports at most " + std::to_string(kMaxExactReductionLevel) + " levels");
  ReductionReport report;
  report.scheme = code.name();
  report.h_min = opt.h_min;
  const std::vector<double> taus = linspace(opt.grid_start, opt.grid_stop, opt.grid_count);
  const auto oracle = asymptotic_profile(scheme_staged(code), taus, opt.levels);
  const auto series = scheme_series(code, opt.levels);
  for (unsigned l = 0; l <= opt.levels; ++l) {
    RealizationTriple current;
    StageRecord rec;
    rec.level = l;
    rec.stage = "exact";
    for (int c = 0; c < 3; ++c) {
      const ExpSeries& s = series[l][c];
      rec.order_before[c] = static_cast<Eigen::Index>(s.term_count());
      if (opt.h_min == 0.0) {
        current[c] = Realization::from_series(s);
      } else {
        const ExactBalancing eb = exact_balance(s);
        rec.hsv[c] = eb.hsv;
        TruncationResult t = truncate(eb, TruncationPolicy::threshold(opt.h_min));
        rec.error_bound[c] = t.error_bound;
        current[c] = std::move(t.system);
      }
      rec.order_after[c] = current[c].order();
    }
    if (l > 0) report.stages.push_back(std::move(rec));
    detail::record_level(report, current, oracle, l, taus);
  }
  detail::record_crossings(report, taus);
  return report;
}

}  // namespace qconcat
