#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gql/config.hpp"
#include "gql/drivers.hpp"
#include "gql/experiments.hpp"
#include "gql/io.hpp"
#include "gql/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;

struct Options {
  std::string config_path;
  std::vector<std::string> ablate;
  std::vector<std::string> set;
  std::string out_dir;
  std::string pgm;
  long trials = 100000;
  long fields = 100;
  long hi_fields = 20;
  bool quiet = false;
};

gql::RunConfig build_config(const std::string& experiment, const Options& o) {
  gql::RunConfig c = gql::default_config(experiment);
  gql::Config file;
  if (!o.config_path.empty()) file = gql::Config::load(o.config_path);
  if (file.has("experiment") && file.get("experiment", std::string()) != experiment)
    throw gql::UsageError("config file is for experiment " + file.get("experiment", std::string()) +
                          ", not " + experiment);
  for (const auto& a : o.set) file.set_assignment(a);
  for (const auto& a : o.ablate) {
    auto eq = a.find('=');
    std::string key = a.substr(0, eq);
    if (eq == std::string::npos || (key != "source_term" && key != "limiter") ||
        a.substr(eq + 1) != "off")
      throw gql::UsageError("--ablate expects source_term=off or limiter=off, got " + a);
    file.set(key, "off");
  }
  if (!o.out_dir.empty()) file.set("output.dir", o.out_dir);
  if (!o.pgm.empty()) file.set("output.pgm", o.pgm);
  file.set("experiment", experiment);
  return gql::apply_config(c, file);
}

std::string snapshot_path(const gql::RunConfig& c, long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.csv", step);
  return c.output_dir + "/" + buf;
}

bool tick(const gql::RunConfig& c, long step) { return c.output_every > 0 && step % c.output_every == 0; }

void maybe_pgm(const gql::RunConfig& c, const std::string& snapshot, int nx, int ny) {
  if (c.pgm_column.empty()) return;
  auto t = gql::io::read_csv(snapshot);
  int col = t.column(c.pgm_column);
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& r : t.rows) v.push_back(r[col]);
  gql::io::write_pgm(c.output_dir + "/" + c.pgm_column + ".pgm", v, nx, ny, c.pgm_column);
}

void write_report(const gql::RunConfig& c, long steps, double t, bool violation,
                  const std::string& witness, double max_div_minus) {
  auto out = gql::io::open_out(c.output_dir + "/report.txt");
  out << "experiment " << c.experiment << "\nsystem " << c.system << "\nsteps " << steps << "\nt "
      << gql::io::num(t) << "\nviolation " << (violation ? "yes" : "no") << "\n";
  if (max_div_minus >= 0.0) out << "max_div_minus " << gql::io::num(max_div_minus) << "\n";
  if (violation) out << "witness " << witness << "\n";
}

int finish(const gql::RunConfig& c, long steps, double t, bool violation, const std::string& witness,
           double max_div_minus, bool quiet) {
  write_report(c, steps, t, violation, witness, max_div_minus);
  if (!quiet) {
    std::printf("%s: %ld steps, t = %.6g", c.experiment.c_str(), steps, t);
    if (max_div_minus >= 0.0) std::printf(", max |div-| = %.3e", max_div_minus);
    std::printf("\n");
  }
  if (violation) {
    std::fprintf(stderr, "bound violation: %s\n", witness.c_str());
    return kExitViolation;
  }
  return kExitOk;
}

int run_1d(const gql::RunConfig& c, bool quiet) {
  auto e = gql::exp::double_rarefaction(c);
  if (c.output_every > 0) gql::exp::write_euler_snapshot(snapshot_path(c, 0), e);
  auto run = gql::exp::run_euler_1d(c, e, [&](long step, double, const auto&) {
    if (tick(c, step)) gql::exp::write_euler_snapshot(snapshot_path(c, step), e);
  });
  gql::io::write_bounds_log(c.output_dir + "/bounds.csv", run.bounds);
  std::string final_path = c.output_dir + "/final.csv";
  gql::exp::write_euler_snapshot(final_path, e);
  maybe_pgm(c, final_path, c.nx, 1);
  return finish(c, run.steps, run.t, run.violation, run.witness, -1.0, quiet);
}

int run_2d(const gql::RunConfig& c, bool quiet) {
  std::string final_path = c.output_dir + "/final.csv";
  gql::exp::FvRun run;
  if (c.system == "tenmoment") {
    auto tm = gql::exp::tenmoment_quadrants(c);
    if (c.output_every > 0) gql::exp::write_tenmoment_snapshot(snapshot_path(c, 0), tm);
    run = gql::exp::run_tenmoment(c, tm, [&](long step, double, const auto&) {
      if (tick(c, step)) gql::exp::write_tenmoment_snapshot(snapshot_path(c, step), tm);
    });
    gql::exp::write_tenmoment_snapshot(final_path, tm);
  } else if (c.system == "mmhd") {
    auto m = gql::exp::mmhd_quadrants(c, gql::exp::blast_spec());
    if (c.output_every > 0) gql::io::write_snapshot<2>(snapshot_path(c, 0), m.grid, m.field, m.spec);
    run = gql::exp::run_mmhd_first_order(c, m, [&](long step, double, const auto& f) {
      if (tick(c, step)) gql::io::write_snapshot<2>(snapshot_path(c, step), m.grid, f, m.spec);
    });
    gql::io::write_snapshot<2>(final_path, m.grid, m.field, m.spec);
  } else {
    throw gql::UsageError("run2d: system must be tenmoment or mmhd");
  }
  gql::io::write_bounds_log(c.output_dir + "/bounds.csv", run.bounds);
  maybe_pgm(c, final_path, c.nx, c.ny);
  return finish(c, run.steps, run.t, run.violation, run.witness, -1.0, quiet);
}

int run_dg(const gql::RunConfig& c, bool quiet) {
  auto pr = c.experiment == "jet" ? gql::exp::jet(c) : gql::exp::blast(c);
  const auto& s = pr.solver;
  auto f = s.project(pr.init);
  if (c.limiter) s.limit(f);
  auto dump = [&](const std::string& path, const auto& field) {
    gql::io::write_snapshot<2>(path, s.grid(), gql::exp::averages<2>(field), s.spec());
  };
  if (c.output_every > 0) dump(snapshot_path(c, 0), f);
  auto t0 = std::chrono::steady_clock::now();
  auto run = gql::exp::run_dg<2>(s, f, c.t_end, c.max_steps, [&](long step, double t, const auto& field) {
    if (tick(c, step)) dump(snapshot_path(c, step), field);
    if (!quiet && step % 500 == 0) {
      double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "step %ld t = %.4e (%.0f s)\n", step, t, el);
    }
  });
  gql::io::write_bounds_log(c.output_dir + "/bounds.csv", run.bounds);
  gql::io::write_cfl_log(c.output_dir + "/cfl.csv", run.cfl);
  std::string final_path = c.output_dir + "/final.csv";
  dump(final_path, f);
  maybe_pgm(c, final_path, c.nx, c.ny);
  return finish(c, run.steps, run.t, run.violation, run.witness, run.max_div_minus, quiet);
}

int run_verify(const gql::RunConfig& c, const Options& o) {
  namespace v = gql::verify;
  bool ok = true;
  {
    auto out = gql::io::open_out(c.output_dir + "/equivalence.csv");
    out << "system,samples,disagreements,degenerate\n";
    for (const auto& sys : v::systems()) {
      auto r = v::check_equivalence(sys, 10000, 1000, c.seed);
      out << sys << ',' << r.samples << ',' << r.disagreements.size() << ',' << r.degenerate << '\n';
      bool pass = r.disagreements.empty() && r.degenerate * 1000 <= r.samples;
      ok = ok && pass;
      if (!o.quiet)
        std::printf("equivalence %-14s %s (%zu disagreements, %ld degenerate)\n", sys.c_str(),
                    pass ? "ok" : "FAIL", r.disagreements.size(), r.degenerate);
    }
  }
  std::vector<v::AuditReport> reps;
  for (const auto& a : v::audits()) {
    long n = a == "MMHD-6.1" ? o.fields : a == "MMHD-6.2" ? o.hi_fields : o.trials;
    auto r = v::audit_theorem_inequalities(a, n, c.seed);
    ok = ok && r.failures == 0;
    if (!o.quiet) {
      std::printf("audit %-18s %s (%ld probes, %ld failures, min margin %.3e)\n", a.c_str(),
                  r.failures == 0 ? "ok" : "FAIL", r.trials, r.failures, r.min_margin);
      for (const auto& w : r.witnesses) std::printf("  counterexample: %s\n", w.c_str());
    }
    reps.push_back(std::move(r));
  }
  v::write_audit_csv(c.output_dir + "/audit.csv", reps);
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound-preserving schemes via geometric quasilinearization"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "key = value file overriding experiment defaults");
  app.add_option("--ablate", o.ablate, "disable a component: source_term=off or limiter=off");
  app.add_option("--set", o.set, "override one config key, e.g. --set grid.nx=64");
  app.add_option("-o,--out", o.out_dir, "output directory");
  app.add_option("--pgm", o.pgm, "write a grayscale image of this final-snapshot column");
  app.add_flag("-q,--quiet", o.quiet, "suppress progress output");
  auto* verify = app.add_subcommand("verify", "equivalence checks and theorem audits");
  verify->add_option("--trials", o.trials, "probes per pointwise audit");
  verify->add_option("--fields", o.fields, "random fields for the first-order MMHD audit");
  verify->add_option("--dg-fields", o.hi_fields, "random fields for the high-order MMHD audit");
  app.add_subcommand("run1d", "1D Euler / Navier-Stokes double rarefaction");
  app.add_subcommand("run2d", "2D random Riemann quadrants (ten-moment or MMHD)");
  app.add_subcommand("blast", "multicomponent MHD blast, third-order DG");
  app.add_subcommand("jet", "multicomponent MHD jet, third-order DG");
  for (auto* s : app.get_subcommands({})) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    gql::RunConfig c = build_config(sub, o);
    std::filesystem::create_directories(c.output_dir);
    if (sub == "verify") return run_verify(c, o);
    if (sub == "run1d") return run_1d(c, o.quiet);
    if (sub == "run2d") return run_2d(c, o.quiet);
    return run_dg(c, o.quiet);
  } catch (const gql::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const gql::DomainError& e) {
    std::fprintf(stderr, "left the admissible set: %s\n", e.what());
    return kExitViolation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
