// qconcat: command-line front end.
//
//   qconcat codes list | show NAME
//   qconcat effchan CODE (--dep T | --pauli P | --channel FILE)
//   qconcat threshold CODE...
//   qconcat series CODE --level L [--stats] [--census X] [--grid a:b:n] ...
//   qconcat reduce [CODE] --levels L --hmin H [--exact] [--out DIR]
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qconcat/channel.hpp"
#include "qconcat/concatenation.hpp"
#include "qconcat/exact_reduction.hpp"
#include "qconcat/exp_series.hpp"
#include "qconcat/high_precision.hpp"
#include "qconcat/reduction.hpp"
#include "qconcat/stabilizer_code.hpp"
#include "qconcat/threshold.hpp"

namespace {

using namespace qconcat;
using nlohmann::json;

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct Grid {
  double start = 0.0;
  double stop = 1.5;
  std::size_t count = 300;

  std::vector<double> points() const { return linspace(start, stop, count); }
};

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  require(parts.size() == 3, "grid must be start:stop:count, got '" + text + "'");
  Grid g;
  try {
    std::size_t used = 0;
    g.start = std::stod(parts[0], &used);
    require(used == parts[0].size(), "bad grid start");
    g.stop = std::stod(parts[1], &used);
    require(used == parts[1].size(), "bad grid stop");
    const long count = std::stol(parts[2], &used);
    require(used == parts[2].size() && count >= 2, "grid count must be an integer >= 2");
    g.count = static_cast<std::size_t>(count);
  } catch (const std::logic_error&) {
    throw InvalidInput("grid must be start:stop:count, got '" + text + "'");
  }
  linspace(g.start, g.stop, g.count);
  return g;
}

int parse_component(const std::string& c) {
  if (c == "x") return 0;
  if (c == "y") return 1;
  if (c == "z") return 2;
  throw InvalidInput("component must be x, y or z, got '" + c + "'");
}

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      require(static_cast<bool>(file_), "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// ---- codes ----

void show_code(std::ostream& out, const StabilizerCode& code, bool as_json) {
  const auto enc = encoding_ops(code);
  const auto dec = decoding_ops(code);
  if (as_json) {
    json gens = json::array();
    for (const auto& g : code.generators()) gens.push_back(g.to_string());
    json e = json::object(), d = json::object();
    for (Pauli s : kPaulis) {
      e[std::string(1, pauli_char(s))] = enc[pauli_index(s)].to_string();
      d[std::string(1, pauli_char(s))] = dec.ops[pauli_index(s)].to_string();
    }
    out << json{{"name", code.name()}, {"n", code.n()}, {"generators", gens},
                {"logical_x", code.logical_x().to_string()}, {"logical_z", code.logical_z().to_string()},
                {"encoding", e}, {"decoding", d}}
               .dump(2)
        << '\n';
    return;
  }
  out << "code " << code.name() << "  n = " << code.n() << "  |S| = " << code.group_order() << '\n';
  out << "generators:";
  if (code.generators().empty()) out << " (none)";
  for (const auto& g : code.generators()) out << ' ' << g.to_string();
  out << "\nlogical X: " << code.logical_x().to_string() << "\nlogical Z: " << code.logical_z().to_string() << '\n';
  for (Pauli s : kPaulis) out << "E_" << pauli_char(s) << " = " << enc[pauli_index(s)].to_string() << '\n';
  for (Pauli s : kPaulis) out << "D_" << pauli_char(s) << " = " << dec.ops[pauli_index(s)].to_string() << '\n';
}

// ---- effchan ----

struct EffchanArgs {
  std::string code;
  std::optional<double> dep;
  std::optional<double> pauli;
  std::string channel_file;
  bool direct = false;
  std::string out;
};

int run_effchan(const EffchanArgs& a) {
  const int given = a.dep.has_value() + a.pauli.has_value() + !a.channel_file.empty();
  require(given == 1, "give exactly one of --dep, --pauli, --channel");
  QubitChannel noise;
  if (a.dep) {
    require(*a.dep >= 0.0 && std::isfinite(*a.dep), "--dep needs τ >= 0");
    noise = depolarizing(*a.dep).to_channel();
  } else if (a.pauli) {
    if (!pauli_probability_in_range(*a.pauli))
      std::cerr << "warning: p = " << *a.pauli << " is outside [0, 3/4]; the channel is not completely positive\n";
    noise = pauli_error(*a.pauli).to_channel();
  } else {
    std::ifstream in(a.channel_file);
    require(static_cast<bool>(in), "cannot open channel file: " + a.channel_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidInput(std::string("channel file is not valid JSON: ") + e.what());
    }
    noise = channel_from_json(j);
  }
  const ConcatMap map = scheme_concat_map(resolve_code(a.code), a.direct);
  Output out(a.out);
  out.stream() << to_json(map.apply(std::vector<QubitChannel>{noise})).dump(2) << '\n';
  return 0;
}

// ---- threshold ----

struct ThresholdArgs {
  std::vector<std::string> codes;
  bool direct = false;
  bool as_json = false;
  std::string out;
};

int run_threshold(const ThresholdArgs& a) {
  std::vector<ThresholdReport> reports;
  for (const auto& name : a.codes) reports.push_back(storage_thresholds(scheme_staged(resolve_code(name), a.direct)));
  Output out(a.out);
  if (a.as_json) {
    json j = json::array();
    for (const auto& r : reports) j.push_back(to_json(r));
    out.stream() << j.dump(2) << '\n';
    return 0;
  }
  out.stream() << format_table(reports);
  for (const auto& r : reports)
    for (const auto& n : r.notes) out.stream() << "# " << r.code << ": " << n << '\n';
  return 0;
}

// ---- series ----

struct SeriesArgs {
  std::string code;
  unsigned level = 0;
  bool stats = false;
  std::optional<double> census;
  std::string grid;
  bool numeric = false;
  std::string component = "z";
  long precision = 0;
  bool hsv = false;
  std::vector<int> truncate;
  bool as_json = false;
  std::string out;
};

void write_grid(std::ostream& out, const StabilizerCode& code, const SeriesArgs& a) {
  const auto taus = parse_grid(a.grid).points();
  const int c = parse_component(a.component);
  const char name = "xyz"[c];
  std::vector<std::vector<double>> columns(a.level + 1, std::vector<double>(taus.size()));
  if (a.numeric) {
    const auto profile = asymptotic_profile(scheme_staged(code), taus, a.level);
    for (unsigned l = 0; l <= a.level; ++l)
      for (std::size_t i = 0; i < taus.size(); ++i) columns[l][i] = profile[l][i].component(kNonIdentityPaulis[c]);
  } else {
    const auto series = scheme_series(code, a.level);
    for (unsigned l = 0; l <= a.level; ++l)
      for (std::size_t i = 0; i < taus.size(); ++i) columns[l][i] = evaluate(series[l][c], taus[i], a.precision).value;
  }
  out << "tau";
  for (unsigned l = 0; l <= a.level; ++l) out << ',' << name << '_' << l;
  out << '\n';
  for (std::size_t i = 0; i < taus.size(); ++i) {
    out << format_number(taus[i]);
    for (unsigned l = 0; l <= a.level; ++l) out << ',' << format_number(columns[l][i]);
    out << '\n';
  }
}

void write_truncations(std::ostream& out, const ExpSeries& s, const SeriesArgs& a) {
  const auto taus = parse_grid(a.grid).points();
  const ExactBalancing eb = exact_balance(s);
  std::vector<Realization> reduced;
  for (int k : a.truncate) reduced.push_back(truncate(eb, TruncationPolicy::fixed_order(k)).system);
  out << "tau,exact";
  for (int k : a.truncate) out << ",order_" << k;
  out << '\n';
  for (double t : taus) {
    out << format_number(t) << ',' << format_number(evaluate(s, t, a.precision).value);
    for (const auto& r : reduced) out << ',' << format_number(r.evaluate(t));
    out << '\n';
  }
}

int run_series(const SeriesArgs& a) {
  const StabilizerCode code = resolve_code(a.code);
  require(a.precision >= 0, "--precision must be nonnegative");
  Output out(a.out);
  std::ostream& os = out.stream();
  if (!a.grid.empty() && a.truncate.empty()) {
    write_grid(os, code, a);
    return 0;
  }
  require(!a.numeric, "--numeric applies to --grid output only");
  const auto series = scheme_series(code, a.level);
  const int c = parse_component(a.component);
  if (!a.truncate.empty()) {
    require(!a.grid.empty(), "--truncate needs --grid");
    write_truncations(os, series[a.level][c], a);
    return 0;
  }
  if (a.hsv) {
    const ExactBalancing eb = exact_balance(series[a.level][c]);
    os << "index,hsv,resolved\n";
    for (std::size_t i = 0; i < eb.hsv.size(); ++i)
      os << i + 1 << ',' << format_number(eb.hsv[i]) << ',' << (i < eb.resolved ? 1 : 0) << '\n';
    return 0;
  }
  if (a.census) {
    require(*a.census > 0.0 && std::isfinite(*a.census), "--census needs a positive threshold");
    const Rational threshold = parse_rational(format_number(*a.census));
    const auto& top = series[a.level];
    if (a.as_json) {
      os << json{{"level", a.level}, {"threshold", *a.census},
                 {"x", top[0].coefficient_census(threshold)}, {"y", top[1].coefficient_census(threshold)},
                 {"z", top[2].coefficient_census(threshold)}}
                .dump(2)
         << '\n';
    } else {
      for (int k = 0; k < 3; ++k)
        os << "xyz"[k] << ' ' << top[k].coefficient_census(threshold) << " of " << top[k].term_count() << '\n';
    }
    return 0;
  }
  if (a.stats) {
    if (a.as_json) {
      json levels = json::array();
      for (unsigned l = 0; l <= a.level; ++l) {
        json terms = json::object(), sums = json::object(), mags = json::object();
        for (int k = 0; k < 3; ++k) {
          const std::string key(1, "xyz"[k]);
          terms[key] = series[l][k].term_count();
          sums[key] = to_string(series[l][k].coefficient_sum());
          mags[key] = series[l][k].max_log2_coefficient();
        }
        levels.push_back({{"level", l}, {"terms", terms}, {"coefficient_sum", sums}, {"max_log2_coefficient", mags}});
      }
      os << json{{"code", code.name()}, {"levels", levels}}.dump(2) << '\n';
    } else {
      char line[160];
      std::snprintf(line, sizeof line, "%5s %8s %8s %8s %6s %6s %6s\n", "level", "x", "y", "z", "sum_x", "sum_y",
                    "sum_z");
      os << line;
      for (unsigned l = 0; l <= a.level; ++l) {
        std::snprintf(line, sizeof line, "%5u %8zu %8zu %8zu %6s %6s %6s\n", l, series[l][0].term_count(),
                      series[l][1].term_count(), series[l][2].term_count(),
                      to_string(series[l][0].coefficient_sum()).c_str(),
                      to_string(series[l][1].coefficient_sum()).c_str(),
                      to_string(series[l][2].coefficient_sum()).c_str());
        os << line;
      }
    }
    return 0;
  }
  // Default: the series themselves.
  const auto& top = series[a.level];
  os << json{{"code", code.name()}, {"level", a.level}, {"x", to_json(top[0])}, {"y", to_json(top[1])},
             {"z", to_json(top[2])}}
            .dump(a.as_json ? 2 : -1)
     << '\n';
  return 0;
}

// ---- reduce ----

struct ReduceArgs {
  std::string code = "shor";
  unsigned levels = 4;
  double h_min = 4e-5;
  bool exact = false;
  std::string grid = "0:1.5:300";
  long order_cap = 5000;
  std::string out_dir;
  bool as_json = false;
};

void write_level_curves(std::ostream& out, const ReductionReport& r, int c) {
  const char name = "xyz"[c];
  const std::size_t levels = r.curves.size();
  out << "tau";
  for (const char* kind : {"exact", "approx", "delta"})
    for (std::size_t l = 0; l < levels; ++l) out << ',' << kind << '_' << name << '_' << l;
  out << '\n';
  const auto& taus = r.curves.front()[c].tau;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    out << format_number(taus[i]);
    for (std::size_t l = 0; l < levels; ++l) out << ',' << format_number(r.curves[l][c].exact[i]);
    for (std::size_t l = 0; l < levels; ++l) out << ',' << format_number(r.curves[l][c].approx[i]);
    for (std::size_t l = 0; l < levels; ++l) out << ',' << format_number(r.curves[l][c].delta[i]);
    out << '\n';
  }
}

void write_hsv_csv(std::ostream& out, const ReductionReport& r) {
  out << "level,stage,component,index,hsv\n";
  for (const auto& s : r.stages)
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < s.hsv[c].size(); ++i)
        out << s.level << ',' << s.stage << ',' << "xyz"[c] << ',' << i + 1 << ',' << format_number(s.hsv[c][i])
            << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  require(static_cast<bool>(f), "cannot write " + path.string());
  f << text;
}

int run_reduce(const ReduceArgs& a) {
  require(a.order_cap >= 1, "--order-cap must be positive");
  const StabilizerCode code = resolve_code(a.code);
  const Grid g = parse_grid(a.grid);
  ReductionOptions opt;
  opt.levels = a.levels;
  opt.h_min = a.h_min;
  opt.order_cap = a.order_cap;
  opt.grid_start = g.start;
  opt.grid_stop = g.stop;
  opt.grid_count = g.count;
  TruncationPolicy::threshold(a.h_min);
  const ReductionReport r =
      a.exact ? exact_reduce(code, opt) : iterative_reduce(reduction_stages(code), opt, code.name());

  if (!a.out_dir.empty()) {
    const std::filesystem::path dir(a.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, "cannot create " + a.out_dir + ": " + ec.message());
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    json reals = json::array();
    for (std::size_t l = 0; l < r.realizations.size(); ++l)
      reals.push_back({{"level", l}, {"x", to_json(r.realizations[l][0])}, {"y", to_json(r.realizations[l][1])},
                       {"z", to_json(r.realizations[l][2])}});
    write_file(dir / "realizations.json", reals.dump(1) + "\n");
    std::ostringstream hsv;
    write_hsv_csv(hsv, r);
    write_file(dir / "hsv.csv", hsv.str());
    for (int c = 0; c < 3; ++c) {
      std::ostringstream curves;
      write_level_curves(curves, r, c);
      write_file(dir / (std::string("curves_") + "xyz"[c] + ".csv"), curves.str());
    }
  }
  if (a.as_json) {
    std::cout << to_json(r).dump(2) << '\n';
    return 0;
  }
  char line[160];
  std::snprintf(line, sizeof line, "%5s %7s %7s %7s %12s %12s %12s\n", "level", "n_x", "n_y", "n_z", "err_x", "err_y",
                "err_z");
  std::cout << line;
  for (std::size_t l = 0; l < r.orders.size(); ++l) {
    std::snprintf(line, sizeof line, "%5zu %7ld %7ld %7ld %12.4e %12.4e %12.4e\n", l, static_cast<long>(r.orders[l][0]),
                  static_cast<long>(r.orders[l][1]), static_cast<long>(r.orders[l][2]), r.max_error[l][0],
                  r.max_error[l][1], r.max_error[l][2]);
    std::cout << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concatenated quantum code channels: exact series, thresholds and balanced truncation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto* codes = app.add_subcommand("codes", "List or show builtin codes");
  codes->require_subcommand(1);
  auto* codes_list = codes->add_subcommand("list", "Builtin code names");
  bool list_json = false;
  codes_list->add_flag("--json", list_json, "JSON output");
  auto* codes_show = codes->add_subcommand("show", "Generators, logicals and E/D operator sums");
  std::string show_name;
  bool show_json = false;
  codes_show->add_option("code", show_name, "Builtin name or code file")->required();
  codes_show->add_flag("--json", show_json, "JSON output");

  EffchanArgs ea;
  auto* effchan = app.add_subcommand("effchan", "Effective logical channel of a code");
  effchan->add_option("code", ea.code, "Builtin name or code file")->required();
  effchan->add_option("--dep", ea.dep, "Depolarizing noise with decay τ");
  effchan->add_option("--pauli", ea.pauli, "Pauli error with probability p");
  effchan->add_option("--channel", ea.channel_file, "Qubit channel JSON file");
  effchan->add_flag("--direct", ea.direct, "Decode shor/shor_prime as single 9-qubit codes");
  effchan->add_option("--out", ea.out, "Output path");

  ThresholdArgs ta;
  auto* threshold = app.add_subcommand("threshold", "Storage thresholds under depolarizing noise");
  threshold->add_option("codes", ta.codes, "Builtin names or code files")->required();
  threshold->add_flag("--direct", ta.direct, "Decode shor/shor_prime as single 9-qubit codes");
  threshold->add_flag("--json", ta.as_json, "JSON output");
  threshold->add_option("--out", ta.out, "Output path");

  SeriesArgs sa;
  auto* series = app.add_subcommand("series", "Exact exponential series of the concatenated channel");
  series->add_option("code", sa.code, "Builtin name or code file")->required();
  series->add_option("--level", sa.level, "Concatenation level")->capture_default_str();
  series->add_flag("--stats", sa.stats, "Term counts and coefficient sums for levels 0..L");
  series->add_option("--census", sa.census, "Count coefficients with |b| above this value");
  series->add_option("--grid", sa.grid, "Evaluate levels 0..L on start:stop:count");
  series->add_flag("--numeric", sa.numeric, "With --grid: iterate the map numerically instead");
  series->add_option("--component", sa.component, "x, y or z")->capture_default_str();
  series->add_option("--precision", sa.precision, "MPFR bits for evaluation (0 = automatic)")->capture_default_str();
  series->add_flag("--hsv", sa.hsv, "Hankel singular values of the exact level-L realization");
  series->add_option("--truncate", sa.truncate, "With --grid: balanced truncations to these orders")->delimiter(',');
  series->add_flag("--json", sa.as_json, "JSON output");
  series->add_option("--out", sa.out, "Output path");

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "Iterative concatenate-then-reduce");
  reduce->add_option("code", ra.code, "Builtin name or code file")->capture_default_str();
  reduce->add_option("--levels", ra.levels, "Concatenation levels")->capture_default_str();
  reduce->add_option("--hmin", ra.h_min, "Truncate HSVs below this value")->capture_default_str();
  reduce->add_flag("--exact", ra.exact, "Start every level from its exact series");
  reduce->add_option("--grid", ra.grid, "Error grid start:stop:count")->capture_default_str();
  reduce->add_option("--order-cap", ra.order_cap, "Abort above this intermediate order")->capture_default_str();
  reduce->add_option("--out", ra.out_dir, "Directory for report, realizations and CSV files");
  reduce->add_flag("--json", ra.as_json, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (codes_list->parsed()) {
      if (list_json)
        std::cout << json(builtin_names()).dump() << '\n';
      else
        for (const auto& n : builtin_names()) std::cout << n << '\n';
    } else if (codes_show->parsed()) {
      show_code(std::cout, resolve_code(show_name), show_json);
    } else if (effchan->parsed()) {
      return run_effchan(ea);
    } else if (threshold->parsed()) {
      return run_threshold(ta);
    } else if (series->parsed()) {
      return run_series(sa);
    } else if (reduce->parsed()) {
      return run_reduce(ra);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
