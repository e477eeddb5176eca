#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include "json.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QCONCAT_BINARY) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qconcat_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, CodesList) {
  const auto r = run("codes list");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 7u);
  const auto j = nlohmann::json::parse(run("codes list --json").out);
  EXPECT_EQ(j.size(), 7u);
}

TEST(Cli, CodesShow) {
  const auto r = run("codes show bitflip");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("ZZI"), std::string::npos);
  EXPECT_NE(r.out.find("1/2 IIZ + 1/2 IZI + 1/2 ZII - 1/2 ZZZ"), std::string::npos);
  EXPECT_EQ(run("codes show trivial").status, 0);
  EXPECT_EQ(run("codes show nosuchcode").status, 2);
}

TEST(Cli, EffchanNoiselessIsIdentity) {
  const auto r = run("effchan bitflip --dep 0");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) EXPECT_EQ(j[i][k].get<double>(), i == k ? 1.0 : 0.0);
  EXPECT_EQ(run("effchan bitflip --dep -1").status, 2);
}

TEST(Cli, Threshold) {
  const auto r = run("threshold shor five_bit");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("0.1050"), std::string::npos);
  EXPECT_NE(r.out.find("0.3151"), std::string::npos);
  EXPECT_NE(r.out.find("0.0748"), std::string::npos);
  EXPECT_NE(r.out.find("0.1376"), std::string::npos);
  const auto j = nlohmann::json::parse(run("threshold steane --json").out);
  EXPECT_NEAR(j[0]["p_th"].get<double>(), 0.0969, 5e-4);
}

TEST(Cli, SeriesStatsAndCensus) {
  const auto stats = run("series shor --level 2 --stats --json");
  ASSERT_EQ(stats.status, 0);
  const auto j = nlohmann::json::parse(stats.out);
  ASSERT_EQ(j["levels"].size(), 3u);
  EXPECT_EQ(j["levels"][2]["terms"]["z"], 37);
  EXPECT_EQ(j["levels"][2]["coefficient_sum"]["y"], "1");
  EXPECT_EQ(run("series shor --level 3 --census 1e60").out, "x 0 of 118\ny 42 of 339\nz 65 of 352\n");
}

TEST(Cli, SeriesGridExactMatchesNumeric) {
  const auto exact = lines(run("series shor --level 2 --grid 0:1:5").out);
  const auto numeric = lines(run("series shor --level 2 --grid 0:1:5 --numeric").out);
  ASSERT_EQ(exact.size(), 6u);
  ASSERT_EQ(numeric.size(), 6u);
  EXPECT_EQ(exact[0], "tau,z_0,z_1,z_2");
  for (std::size_t i = 1; i < exact.size(); ++i) {
    std::istringstream a(exact[i]), b(numeric[i]);
    for (std::string x, y; std::getline(a, x, ',') && std::getline(b, y, ',');)
      EXPECT_NEAR(std::stod(x), std::stod(y), 1e-12);
  }
}

TEST(Cli, SeriesHsvAndTruncations) {
  const auto h = lines(run("series shor --level 2 --hsv").out);
  ASSERT_EQ(h.size(), 38u);
  EXPECT_EQ(h[0], "index,hsv,resolved");
  EXPECT_EQ(h[1].substr(0, 7), "1,0.253");
  const auto t = lines(run("series shor --level 2 --grid 0:1.5:4 --truncate 4,2").out);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t[0], "tau,exact,order_4,order_2");
}

TEST(Cli, ReduceOrdersAndFiles) {
  const auto dir = scratch("reduce");
  const auto r = run("reduce shor --levels 2 --out " + dir.string());
  ASSERT_EQ(r.status, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  std::istringstream l2(rows[3]);
  int level, nx, ny, nz;
  l2 >> level >> nx >> ny >> nz;
  EXPECT_EQ(level, 2);
  EXPECT_EQ(nx, 4);
  EXPECT_EQ(ny, 4);
  EXPECT_EQ(nz, 5);
  for (const char* f : {"report.json", "realizations.json", "hsv.csv", "curves_x.csv", "curves_y.csv", "curves_z.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["levels"][2]["orders"], nlohmann::json({4, 4, 5}));
  EXPECT_EQ(report["stages"].size(), 4u);
  const auto curves = lines(slurp(dir / "curves_z.csv"));
  EXPECT_EQ(curves.size(), 301u);
  EXPECT_EQ(curves[0], "tau,exact_z_0,exact_z_1,exact_z_2,approx_z_0,approx_z_1,approx_z_2,delta_z_0,delta_z_1,delta_z_2");
  EXPECT_EQ(lines(slurp(dir / "hsv.csv"))[0], "level,stage,component,index,hsv");
  const auto reals = nlohmann::json::parse(slurp(dir / "realizations.json"));
  EXPECT_EQ(reals[2]["z"]["order"], 5);
}

TEST(Cli, OutputIsDeterministic) {
  const auto a = run("reduce shor --levels 2 --json");
  const auto b = run("reduce shor --levels 2 --json");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigFile) {
  const auto dir = scratch("config");
  {
    std::ofstream f(dir / "run.ini");
    f << "[reduce]\nlevels = 1\nhmin = 4e-5\n";
  }
  const auto r = run("--config " + (dir / "run.ini").string() + " reduce shor");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 3u);
  {
    std::ofstream f(dir / "bad.ini");
    f << "nonsense = 3\n";
  }
  EXPECT_EQ(run("--config " + (dir / "bad.ini").string() + " reduce shor --levels 1").status, 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("reduce shor --levels 1 --hmin 1e9").status, 2);
  EXPECT_EQ(run("reduce shor --levels 3 --hmin 0 --order-cap 1000").status, 3);
  EXPECT_EQ(run("series shor --level 3 --grid 0:1:3 --precision 64").status, 3);
  EXPECT_EQ(run("series shor --level 1 --component w").status, 2);
}
