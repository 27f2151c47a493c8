#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gql/drivers.hpp"
#include "gql/experiments.hpp"
#include "gql/verify.hpp"

using namespace gql;
namespace fs = std::filesystem;
using S2 = mmhd::State<2>;
using L2 = mmhd::Layout<2>;

namespace {

constexpr std::uint64_t kSeed = 20240611;

// Pinned tolerances.
constexpr double kEquivalenceSeconds = 30.0;
constexpr double kDegenerateFraction = 1e-3;
constexpr double kIdentityTol = 1e-12;
constexpr double kRhdRecoveryTol = 1e-10;
constexpr double kRmhdRecoveryTol = 1e-8;
constexpr double kRecoverySeconds = 10.0;
constexpr double kDivTol = 1e-11;
constexpr double kBlastSeconds = 15.0 * 60.0;
constexpr double kMeanDriftTol = 1e-14;
constexpr double kConservationTol = 1e-12;

struct Result {
  bool pass = true;
  std::string detail;

  void fail_if(bool bad, const std::string& why) {
    if (!bad) return;
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Result equivalence() {
  Result res;
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& sys : verify::systems()) {
    auto r = verify::check_equivalence(sys, 10000, 1000, kSeed);
    res.fail_if(!r.disagreements.empty(), sys + " has " + std::to_string(r.disagreements.size()) + " disagreements");
    res.fail_if(r.degenerate > kDegenerateFraction * r.samples, sys + " degenerate " + std::to_string(r.degenerate));
    res.fail_if(r.sampler_errors != 0, sys + " sampler errors");
  }
  double el = seconds_since(t0);
  res.fail_if(el > kEquivalenceSeconds, "took " + fmt("%.1f s", el));
  res.note("7 systems x 11000 states in " + fmt("%.1f s", el));
  return res;
}

Result identities() {
  Result res;
  double worst = 0.0;
  for (const auto& id : verify::identities()) {
    auto r = verify::check_identity(id, 100000, kSeed);
    worst = std::max(worst, r.max_residual);
    res.fail_if(r.max_residual > kIdentityTol, id + " residual " + fmt("%.2e", r.max_residual));
  }
  res.note("max scaled residual " + fmt("%.2e", worst));
  return res;
}

Result recovery() {
  Result res;
  auto t0 = std::chrono::steady_clock::now();
  auto a = verify::check_recovery("rhd", 10000, kSeed);
  auto b = verify::check_recovery("rmhd", 10000, kSeed);
  double el = seconds_since(t0);
  res.fail_if(a.max_rel_p > kRhdRecoveryTol, "rhd p error " + fmt("%.2e", a.max_rel_p));
  res.fail_if(b.max_rel_p > kRmhdRecoveryTol, "rmhd p error " + fmt("%.2e", b.max_rel_p));
  res.fail_if(el > kRecoverySeconds, "took " + fmt("%.1f s", el));
  res.note("rhd " + fmt("%.2e", a.max_rel_p) + ", rmhd " + fmt("%.2e", b.max_rel_p) + " in " + fmt("%.2f s", el));
  return res;
}

void check_bounds(Result& res, const std::string& name, const exp::FvRun& run, double t_end) {
  res.fail_if(run.violation, name + ": " + run.witness);
  res.fail_if(run.t != t_end && t_end > 0.0, name + " stopped at t = " + fmt("%.4g", run.t));
  for (const auto& b : run.bounds)
    if (!(b.min_rho > 0.0 && b.min_p > 0.0)) {
      res.fail_if(true, name + " bound lost at step " + std::to_string(b.step));
      break;
    }
}

Result fv_bounds() {
  Result res;
  for (const char* flux : {"lf", "gk"}) {
    for (const char* sys : {"euler", "ns"}) {
      auto c = default_config("run1d");
      c.flux = flux, c.system = sys;
      auto e = exp::double_rarefaction(c);
      auto run = exp::run_euler_1d(c, e, [](long, double, const auto&) {});
      check_bounds(res, std::string(sys) + "/" + flux, run, c.t_end);
      res.note(std::string(sys) + "/" + flux + " " + std::to_string(run.steps) + " steps");
    }
  }
  auto c = default_config("run2d");
  c.seed = kSeed;
  auto tm = exp::tenmoment_quadrants(c);
  auto run = exp::run_tenmoment(c, tm, [](long, double, const auto&) {});
  check_bounds(res, "tenmoment", run, -1.0);
  res.fail_if(run.steps != 20, "tenmoment ran " + std::to_string(run.steps) + " steps");
  double lam = 1e300;
  for (const auto& b : run.bounds) lam = std::min(lam, b.min_p);
  res.note("tenmoment min eigenvalue " + fmt("%.3e", lam));
  return res;
}

Result mmhd_audit() {
  Result res;
  auto r = verify::audit_theorem_inequalities("MMHD-6.1", 100, kSeed);
  res.fail_if(r.failures != 0, std::to_string(r.failures) + " counterexamples");
  res.fail_if(r.trials != 100L * 400 * 100, "ran " + std::to_string(r.trials) + " probes");
  res.note(std::to_string(r.trials) + " probes, " + std::to_string(r.degenerate) + " degenerate, min margin " +
           fmt("%.3e", r.min_margin));
  if (!r.witnesses.empty()) res.note("first: " + r.witnesses[0]);
  return res;
}

void dg_run(Result& res, const char* name, auto problem_fn, double limit_seconds) {
  auto c = default_config(name);
  auto pr = problem_fn(c);
  auto f = pr.solver.project(pr.init);
  pr.solver.limit(f);
  auto t0 = std::chrono::steady_clock::now();
  auto run = exp::run_dg<2>(pr.solver, f, c.t_end, 0, [](long, double, const auto&) {});
  double el = seconds_since(t0);
  res.fail_if(run.violation, std::string(name) + ": " + run.witness);
  res.fail_if(run.t != c.t_end, std::string(name) + " stopped at t = " + fmt("%.4g", run.t));
  res.fail_if(run.max_div_minus > kDivTol, std::string(name) + " |div-| " + fmt("%.2e", run.max_div_minus));
  if (limit_seconds > 0.0) res.fail_if(el > limit_seconds, std::string(name) + " took " + fmt("%.0f s", el));
  res.note(std::string(name) + " " + std::to_string(c.nx) + "x" + std::to_string(c.ny) + " " +
           std::to_string(run.steps) + " steps, max |div-| " + fmt("%.2e", run.max_div_minus) + ", " +
           fmt("%.0f s", el));
}

Result dg_end_to_end() {
  Result res;
  dg_run(res, "blast", [](const RunConfig& c) { return exp::blast(c); }, kBlastSeconds);
  dg_run(res, "jet", [](const RunConfig& c) { return exp::jet(c); }, 0.0);
  return res;
}

dg::Cell<2> perturbed_cell(verify::Rng& r) {
  auto u = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(1e-2, 1e2)));
  double perturb = r.uniform(0.05, 1.0);
  dg::Cell<2> cell;
  for (int v = 0; v < L2::kVars; ++v) {
    if (!dg::Cell<2>::is_scalar(v)) continue;
    cell.c[v][0] = u[v];
    for (int m = 1; m < dg::kModes; ++m) cell.c[v][m] = perturb * (std::abs(u[v]) + 0.1) * r.normal();
  }
  cell.d[0] = u[L2::kMag];
  cell.d[1] = u[L2::kMag + 1];
  for (int k = 2; k < dg::kMagModes; ++k) cell.d[k] = perturb * (1.0 + std::abs(u[L2::kMag])) * r.normal();
  return cell;
}

Result limiter_contracts() {
  Result res;
  static const dg::Tables tables;
  verify::Rng r(kSeed);
  int limited = 0, bad_points = 0, not_idem = 0;
  double drift = 0.0;
  for (int k = 0; k < 1000; ++k) {
    auto c = perturbed_cell(r);
    auto mean = c.mean();
    auto th = limiter::scale_limit<2>(c, tables.limiter);
    if (th.density < 1.0 || th.fractions > 0.0 || th.energy < 1.0) ++limited;
    if (!limiter::points_admissible<2>(c, tables.limiter)) ++bad_points;
    auto after = c.mean();
    for (int i = 0; i < L2::kVars; ++i)
      drift = std::max(drift, std::abs(after[i] - mean[i]) / (1.0 + std::abs(mean[i])));
    auto again = c;
    limiter::scale_limit<2>(again, tables.limiter);
    if (again.c != c.c || again.d != c.d) ++not_idem;
  }
  res.fail_if(bad_points != 0, std::to_string(bad_points) + " cells inadmissible after limiting");
  res.fail_if(drift > kMeanDriftTol, "mean drift " + fmt("%.2e", drift));
  res.fail_if(not_idem != 0, std::to_string(not_idem) + " cells change on a second pass");
  res.note(std::to_string(limited) + " of 1000 cells limited, mean drift " + fmt("%.2e", drift));
  return res;
}

template <class F>
std::vector<double> totals(const F& f) {
  std::vector<double> s(f[0].size(), 0.0);
  for (const auto& u : f)
    for (std::size_t c = 0; c < u.size(); ++c) s[c] += u[c];
  return s;
}

template <class F>
double norm1(const F& f) {
  double s = 0.0;
  for (const auto& u : f)
    for (double x : u) s += std::abs(x);
  return s;
}

// Worst per-component, per-step drift relative to ||u0||.
struct Drift {
  double worst = 0.0;
  void add(const std::vector<double>& a, const std::vector<double>& b, double n0) {
    for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(a[c] - b[c]) / n0);
  }
};

Result conservation() {
  Result res;
  const int steps = 20;
  verify::Rng r(kSeed);
  auto check = [&](const std::string& name, const Drift& d, bool ok = true) {
    res.fail_if(!ok || d.worst > kConservationTol, name + " drift " + fmt("%.2e", d.worst));
    res.note(name + " " + fmt("%.1e", d.worst));
  };

  Grid1d<gasdyn::State> line;
  line.n_cells = 64, line.dx = 1.0 / 64;
  gasdyn::NsParams prm;
  for (int kind = 0; kind < 4; ++kind) {
    auto flux = kind % 2 ? fv::FluxKind::GasKinetic : fv::FluxKind::LaxFriedrichs;
    fv::EulerField f(64);
    for (int i = 0; i < 64; ++i) {
      double x = line.center(i);
      f[i] = gasdyn::from_primitive(1 + 0.5 * std::sin(2 * M_PI * x), std::cos(2 * M_PI * x), 1.0);
    }
    double n0 = norm1(f);
    Drift d;
    bool ok = true;
    for (int s = 0; s < steps; ++s) {
      auto before = totals(f);
      auto [next, rep] = kind < 2 ? fv::step_euler_1d(f, line, flux, 1.0) : fv::step_ns_1d(f, line, prm, 1.0, flux);
      ok = ok && !rep.violation;
      f = std::move(next);
      d.add(totals(f), before, n0);
    }
    check(std::string(kind < 2 ? "euler" : "ns") + (kind % 2 ? "/gk" : "/lf"), d, ok);
  }

  {
    Grid2d<tenmoment::State> g;
    g.nx = 12, g.ny = 10, g.dx = 1.0 / 12, g.dy = 0.1;
    fv::TenMomentField f(g.cells());
    for (auto& u : f) u = tenmoment::as_state(verify::tm_sample(r, 0.05, 2.0));
    double n0 = norm1(f);
    Drift d;
    bool ok = true;
    for (int s = 0; s < steps; ++s) {
      auto before = totals(f);
      auto [next, rep] = fv::step_tenmoment_2d(f, g, fv::kTenMomentMaxCfl);
      ok = ok && !rep.violation;
      f = std::move(next);
      d.add(totals(f), before, n0);
    }
    check("tenmoment", d, ok);
  }

  {
    auto g = verify::periodic_grid(8, 8, 1.0 / 8, 1.0 / 8);
    std::vector<S2> f(g.cells());
    for (auto& u : f) u = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(0.5, 5)));
    double n0 = norm1(f);
    fv::MmhdFirstOrderOptions opt;
    opt.probes = 0;
    Drift d;
    for (int s = 0; s < steps; ++s) {
      auto before = totals(f);
      auto [next, rep] = fv::step_mmhd_first_order<2>(f, g, verify::audit_mixture(), opt);
      f = std::move(next);
      d.add(totals(f), before, n0);
    }
    check("mmhd-fv", d);
  }

  for (bool source : {false, true}) {
    dg::DgOptions o;
    o.source_term = source;
    dg::MmhdDg<2> s(verify::periodic_grid(8, 8, 1.0 / 8, 1.0 / 8), verify::audit_mixture(), o);
    auto f = verify::random_dg_field<2>(r, s, 0.2);
    auto means = exp::averages<2>(f);
    double n0 = norm1(means);
    Drift d;
    bool ok = true;
    for (int k = 0; k < steps; ++k) {
      auto before = totals(exp::averages<2>(f));
      auto rep = s.step(f);
      ok = ok && !rep.violation;
      auto after = totals(exp::averages<2>(f));
      for (int v = 0; v < L2::kVars; ++v) before[v] += rep.source_total[v];
      d.add(after, before, n0);
    }
    check(source ? "dg with source, net of source" : "dg", d, ok);
  }
  return res;
}

int run_cli(const std::string& args) {
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

Result determinism() {
  Result res;
  const std::vector<std::string> runs = {
      "blast --set grid.nx=24 --set grid.ny=24 --set time.max_steps=20 --set output.every=5",
      "jet --set grid.nx=10 --set grid.ny=30 --set time.max_steps=20 --set output.every=10",
      "run1d --set flux=gk --set output.every=50",
      "run1d --set system=ns",
      "run2d --set output.every=5",
      "run2d --set system=mmhd --set grid.nx=20 --set grid.ny=20 --set time.max_steps=10",
  };
  auto root = fs::temp_directory_path() / "gql_acceptance_determinism";
  int files = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    fs::path a = root / (std::to_string(k) + "a"), b = root / (std::to_string(k) + "b");
    fs::remove_all(a), fs::remove_all(b);
    int ea = run_cli(runs[k] + " -o " + a.string()), eb = run_cli(runs[k] + " -o " + b.string());
    res.fail_if(ea != 0 || eb != 0, "'" + runs[k] + "' exited " + std::to_string(ea) + "/" + std::to_string(eb));
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      auto other = b / e.path().filename();
      res.fail_if(!fs::exists(other) || slurp(e.path()) != slurp(other),
                  runs[k] + ": " + e.path().filename().string() + " differs");
    }
  }
  fs::remove_all(root);
  res.fail_if(files < 20, "only " + std::to_string(files) + " CSV files compared");
  res.note(std::to_string(files) + " CSV files byte-identical across two runs");
  return res;
}

struct Criterion {
  const char* title;
  std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"GQL equivalence", equivalence},
      {"algebraic identities", identities},
      {"primitive recovery", recovery},
      {"finite-volume bound preservation", fv_bounds},
      {"first-order MMHD inequality audit", mmhd_audit},
      {"high-order DG blast and jet", dg_end_to_end},
      {"limiter contracts", limiter_contracts},
      {"conservation", conservation},
      {"determinism", determinism},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    int k = std::atoi(argv[i]);
    if (k < 1 || k > int(all.size())) {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], all.size());
      return 2;
    }
    which.push_back(k);
  }
  if (which.empty())
    for (int k = 1; k <= int(all.size()); ++k) which.push_back(k);

  bool ok = true;
  for (int k : which) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = all[k - 1].run();
    } catch (const std::exception& e) {
      r.fail_if(true, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d %s: %s (%.1f s) %s\n", k, all[k - 1].title, r.pass ? "PASS" : "FAIL",
                seconds_since(t0), r.detail.c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
