#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "fv.hpp"
#include "io.hpp"

// Finite-volume regression runs: 1D Euler / Navier-Stokes and 2D random
// Riemann quadrants for the ten-moment and multicomponent MHD systems.
namespace gql::exp {

struct FvRun {
  long steps = 0;
  double t = 0.0;
  bool violation = false;
  std::string witness;
  std::vector<io::BoundsRecord> bounds;
};

inline fv::FluxKind flux_kind(const std::string& name) {
  if (name == "lf") return fv::FluxKind::LaxFriedrichs;
  if (name == "gk") return fv::FluxKind::GasKinetic;
  throw UsageError("unknown flux " + name + " (expected lf or gk)");
}

inline gasdyn::NsParams ns_params(const RunConfig& c) {
  gasdyn::NsParams p;
  p.eta = c.eta;
  p.reynolds = c.reynolds;
  p.prandtl = c.prandtl;
  return p;
}

struct Euler1d {
  Grid1d<gasdyn::State> grid;
  fv::EulerField field;
};

// (rho, v, p) = (1, -2, 0.1) | (1, 2, 0.1), split at the domain midpoint.
inline Euler1d double_rarefaction(const RunConfig& c) {
  Euler1d e;
  e.grid.n_cells = c.nx;
  e.grid.dx = (c.x1 - c.x0) / c.nx;
  e.grid.x0 = c.x0;
  e.grid.left = SideBc<gasdyn::State>::outflow();
  e.grid.right = SideBc<gasdyn::State>::outflow();
  double mid = 0.5 * (c.x0 + c.x1);
  for (int i = 0; i < c.nx; ++i)
    e.field.push_back(gasdyn::from_primitive(1.0, e.grid.center(i) < mid ? -2.0 : 2.0, 0.1));
  return e;
}

inline io::BoundsRecord fv_record(long step, double t, const StepReport& rep, double p_factor) {
  io::BoundsRecord b;
  b.step = step, b.t = t, b.dt = rep.dt;
  const Bound* rho = rep.find("density");
  b.min_rho = rho ? rho->min : 0.0;
  const Bound* e = rep.find("internal_energy");
  if (!e) e = rep.find("min_eigenvalue");
  b.min_p = e ? p_factor * e->min : 0.0;
  b.min_Y = b.max_Y = 1.0;
  b.max_absdiv = rep.max_abs_div;
  return b;
}

template <class OnStep>
FvRun run_euler_1d(const RunConfig& c, Euler1d& e, OnStep&& on_step) {
  const bool ns = c.system == "ns";
  if (!ns && c.system != "euler") throw UsageError("run1d: system must be euler or ns");
  auto kind = flux_kind(c.flux);
  auto prm = ns_params(c);
  FvRun run;
  while (run.t < c.t_end && (c.max_steps <= 0 || run.steps < c.max_steps)) {
    double left = c.t_end - run.t;
    auto [next, rep] = ns ? fv::step_ns_1d(e.field, e.grid, prm, c.cfl, kind, left)
                          : fv::step_euler_1d(e.field, e.grid, kind, c.cfl, 1.4, left);
    ++run.steps;
    run.t = rep.dt >= left ? c.t_end : run.t + rep.dt;
    run.bounds.push_back(fv_record(run.steps, run.t, rep, 0.4));
    if (rep.violation) {
      run.violation = true;
      run.witness = "step " + std::to_string(run.steps) + ": " + rep.witness;
      return run;
    }
    e.field = std::move(next);
    on_step(run.steps, run.t, e.field);
  }
  return run;
}

inline void write_euler_snapshot(const std::string& path, const Euler1d& e) {
  auto out = io::open_out(path);
  out << "x,rho,v,p\n";
  for (int i = 0; i < e.grid.n_cells; ++i) {
    const auto& u = e.field[i];
    out << io::num(e.grid.center(i)) << ',' << io::num(u[0]) << ',' << io::num(u[1] / u[0]) << ','
        << io::num(gasdyn::pressure(u)) << '\n';
  }
}

template <class S>
Grid2d<S> outflow_box(const RunConfig& c) {
  Grid2d<S> g;
  g.nx = c.nx, g.ny = c.ny;
  g.dx = (c.x1 - c.x0) / c.nx, g.dy = (c.y1 - c.y0) / c.ny;
  g.x0 = c.x0, g.y0 = c.y0;
  for (auto& b : g.bc) b = SideBc<S>::outflow();
  return g;
}

// Quadrant index of a point relative to the box centre.
inline int quadrant(const RunConfig& c, double x, double y) {
  return (x >= 0.5 * (c.x0 + c.x1) ? 1 : 0) + (y >= 0.5 * (c.y0 + c.y1) ? 2 : 0);
}

struct TenMoment2d {
  Grid2d<tenmoment::State> grid;
  fv::TenMomentField field;
};

inline TenMoment2d tenmoment_quadrants(const RunConfig& c) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::array<tenmoment::State, 4> q;
  for (auto& s : q) {
    double rho = 0.2 + 2.0 * u01(rng);
    double v1 = 2.0 * u01(rng) - 1.0, v2 = 2.0 * u01(rng) - 1.0;
    double l1 = 0.05 + u01(rng), l2 = 0.05 + u01(rng);
    double a = std::numbers::pi * u01(rng);
    double cs = std::cos(a), sn = std::sin(a);
    s = tenmoment::from_primitive(
        rho, v1, v2, {l1 * cs * cs + l2 * sn * sn, (l1 - l2) * cs * sn, l1 * sn * sn + l2 * cs * cs});
  }
  TenMoment2d t;
  t.grid = outflow_box<tenmoment::State>(c);
  t.field.resize(t.grid.cells());
  for (int j = 0; j < c.ny; ++j)
    for (int i = 0; i < c.nx; ++i)
      t.field[t.grid.index(i, j)] = q[quadrant(c, t.grid.xc(i), t.grid.yc(j))];
  return t;
}

template <class OnStep>
FvRun run_tenmoment(const RunConfig& c, TenMoment2d& tm, OnStep&& on_step) {
  FvRun run;
  while (run.t < c.t_end && (c.max_steps <= 0 || run.steps < c.max_steps)) {
    double left = c.t_end - run.t;
    auto [next, rep] = fv::step_tenmoment_2d(tm.field, tm.grid, c.cfl, left);
    ++run.steps;
    run.t = rep.dt >= left ? c.t_end : run.t + rep.dt;
    run.bounds.push_back(fv_record(run.steps, run.t, rep, 1.0));
    if (rep.violation) {
      run.violation = true;
      run.witness = "step " + std::to_string(run.steps) + ": " + rep.witness;
      return run;
    }
    tm.field = std::move(next);
    on_step(run.steps, run.t, tm.field);
  }
  return run;
}

inline void write_tenmoment_snapshot(const std::string& path, const TenMoment2d& tm) {
  auto out = io::open_out(path);
  out << "x,y,rho,vx,vy,p11,p12,p22\n";
  for (int j = 0; j < tm.grid.ny; ++j)
    for (int i = 0; i < tm.grid.nx; ++i) {
      const auto& u = tm.field[tm.grid.index(i, j)];
      auto p = tenmoment::pressure(u);
      out << io::num(tm.grid.xc(i)) << ',' << io::num(tm.grid.yc(j)) << ',' << io::num(u[0]) << ','
          << io::num(u[1] / u[0]) << ',' << io::num(u[2] / u[0]) << ',' << io::num(p.a11) << ','
          << io::num(p.a12) << ',' << io::num(p.a22) << '\n';
    }
}

struct Mmhd2d {
  Grid2d<mmhd::State<2>> grid;
  mmhd::MixtureSpec<2> spec;
  std::vector<mmhd::State<2>> field;
};

// Random quadrants for the two-species first-order scheme; the magnetic
// field differs across quadrants, so the central divergence is nonzero.
inline Mmhd2d mmhd_quadrants(const RunConfig& c, const mmhd::MixtureSpec<2>& spec) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::array<mmhd::State<2>, 4> q;
  for (auto& s : q) {
    mmhd::Primitive<2> w;
    w.rho = 0.2 + 2.0 * u01(rng);
    for (int d = 0; d < 3; ++d) {
      w.v[d] = 2.0 * u01(rng) - 1.0;
      w.B[d] = 4.0 * u01(rng) - 2.0;
    }
    w.p = 0.1 + u01(rng);
    double y = u01(rng);
    w.Y = {y, 1.0 - y};
    s = mmhd::to_conserved<2>(w, spec);
  }
  Mmhd2d m;
  m.grid = outflow_box<mmhd::State<2>>(c);
  m.spec = spec;
  m.field.resize(m.grid.cells());
  for (int j = 0; j < c.ny; ++j)
    for (int i = 0; i < c.nx; ++i)
      m.field[m.grid.index(i, j)] = q[quadrant(c, m.grid.xc(i), m.grid.yc(j))];
  return m;
}

template <class OnStep>
FvRun run_mmhd_first_order(const RunConfig& c, Mmhd2d& m, OnStep&& on_step) {
  fv::MmhdFirstOrderOptions opt;
  opt.cfl = c.cfl;
  opt.seed = c.seed;
  FvRun run;
  while (run.t < c.t_end && (c.max_steps <= 0 || run.steps < c.max_steps)) {
    opt.max_dt = c.t_end - run.t;
    auto [next, rep] = fv::step_mmhd_first_order<2>(m.field, m.grid, m.spec, opt);
    ++run.steps;
    run.t = rep.dt >= opt.max_dt ? c.t_end : run.t + rep.dt;
    io::BoundsRecord b = fv_record(run.steps, run.t, rep, 0.0);
    if (!rep.violation) {
      b.min_p = std::numeric_limits<double>::infinity();
      b.min_Y = 1.0, b.max_Y = 0.0;
      for (const auto& u : next) {
        b.min_p = std::min(b.min_p, mmhd::pressure<2>(u, m.spec));
        b.min_Y = std::min(b.min_Y, u[0] / u[1]);
        b.max_Y = std::max(b.max_Y, u[0] / u[1]);
      }
    }
    run.bounds.push_back(b);
    if (rep.violation) {
      run.violation = true;
      run.witness = "step " + std::to_string(run.steps) + ": " + rep.witness;
      return run;
    }
    m.field = std::move(next);
    on_step(run.steps, run.t, m.field);
  }
  return run;
}

}  // namespace gql::exp
