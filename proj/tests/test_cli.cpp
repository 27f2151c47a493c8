#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gql/dg/basis.hpp"
#include "gql/io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("gqlrun_test_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  std::string cmd = std::string(GQLRUN) + " -q " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, SingleCellSnapshot) {
  auto d = scratch("one");
  ASSERT_EQ(run("blast --set grid.nx=1 --set grid.ny=1 --set time.max_steps=1 -o " + d.string()), 0);
  auto text = slurp(d / "final.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  auto t = gql::io::read_csv((d / "final.csv").string());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.header[0], "x");
  EXPECT_GT(t.rows[0][t.column("rho")], 0.0);
}

TEST(Cli, CsvNumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1000.0}) {
    double back = std::stod(gql::io::num(v));
    EXPECT_LE(std::abs(back - v), 1e-15 * std::abs(v));
  }
}

TEST(Cli, BlastInitialPressure) {
  auto d = scratch("blast0");
  ASSERT_EQ(run("blast --set grid.nx=20 --set grid.ny=20 --set output.every=1 "
                "--set time.max_steps=1 -o " + d.string()),
            0);
  auto t = gql::io::read_csv((d / "snapshot_000000.csv").string());
  EXPECT_EQ(t.rows.size(), 400u);
  int px = t.column("x"), py = t.column("y"), pp = t.column("p");
  double inner = 0.0, outer = 1e300;
  for (const auto& r : t.rows) {
    if (std::hypot(r[px], r[py]) < 0.05) inner = std::max(inner, r[pp]);
    outer = std::min(outer, r[pp]);
  }
  EXPECT_NEAR(inner, 1000.0, 1e-9);
  EXPECT_GT(outer, 0.0);
  EXPECT_TRUE(fs::exists(d / "snapshot_000001.csv"));
  EXPECT_TRUE(fs::exists(d / "report.txt"));
}

TEST(Cli, DgLogsRespectEffectiveCfl) {
  auto d = scratch("cfl");
  ASSERT_EQ(run("jet --set grid.nx=10 --set grid.ny=30 --set time.max_steps=5 -o " + d.string()), 0);
  auto b = gql::io::read_csv((d / "bounds.csv").string());
  auto c = gql::io::read_csv((d / "cfl.csv").string());
  ASSERT_EQ(b.rows.size(), 5u);
  ASSERT_EQ(c.rows.size(), 5u);
  for (std::size_t k = 0; k < b.rows.size(); ++k) {
    EXPECT_GT(b.rows[k][b.column("dt")], 0.0);
    EXPECT_GT(b.rows[k][b.column("min_rho")], 0.0);
    EXPECT_GT(b.rows[k][b.column("min_p")], 0.0);
    EXPECT_GT(c.rows[k][c.column("lambda_eff")], 0.0);
    EXPECT_LE(c.rows[k][c.column("lambda_eff")], gql::dg::kOmegaHat1 * (1 + 1e-12));
    EXPECT_LE(c.rows[k][c.column("max_div_minus")], 1e-11);
  }
}

TEST(Cli, OneDimensionalAndQuadrantRuns) {
  auto d = scratch("fv");
  EXPECT_EQ(run("run1d --set flux=gk -o " + d.string()), 0);
  EXPECT_TRUE(fs::exists(d / "final.csv"));
  EXPECT_EQ(run("run1d --set system=ns --set time.t_end=0.01 -o " + d.string()), 0);
  EXPECT_EQ(run("run2d --set grid.nx=10 --set grid.ny=10 -o " + d.string()), 0);
  EXPECT_EQ(run("run2d --set system=mmhd --set grid.nx=10 --set grid.ny=10 --pgm rho -o " + d.string()), 0);
  EXPECT_TRUE(fs::exists(d / "rho.pgm"));
}

TEST(Cli, ExitCodes) {
  auto d = scratch("exit");
  EXPECT_EQ(run("--bogus blast -o " + d.string()), 2);
  EXPECT_EQ(run("-o " + d.string()), 2);
  EXPECT_EQ(run("blast --ablate limiter=maybe -o " + d.string()), 2);
  EXPECT_EQ(run("blast --set time.cfl=2 -o " + d.string()), 2);
  EXPECT_EQ(run("run1d --set flux=roe -o " + d.string()), 2);
  EXPECT_EQ(run("run2d --set grid.nx=4 --set grid.ny=4 --set time.cfl=1 -o " + d.string()), 2);
  EXPECT_EQ(run("blast --ablate limiter=off --set grid.nx=20 --set grid.ny=20 -o " + d.string()), 3);
  EXPECT_EQ(run("blast --config " + (d / "missing.cfg").string() + " -o " + d.string()), 2);
}

TEST(Cli, ConfigFileMustMatchExperiment) {
  auto d = scratch("cfg");
  fs::create_directories(d);
  {
    std::ofstream f(d / "jet.cfg");
    f << "experiment = jet\ngrid.nx = 4\n";
  }
  EXPECT_EQ(run("blast --config " + (d / "jet.cfg").string() + " -o " + d.string()), 2);
}

TEST(Cli, RepeatedRunsAreBitIdentical) {
  auto a = scratch("det_a"), b = scratch("det_b");
  std::string args = "blast --set grid.nx=12 --set grid.ny=12 --set time.max_steps=4 --set output.every=2 -o ";
  ASSERT_EQ(run(args + a.string()), 0);
  ASSERT_EQ(run(args + b.string()), 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_GE(files, 5);
}
