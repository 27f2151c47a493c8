#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "config.hpp"
#include "dg/solver.hpp"
#include "io.hpp"
#include "mhd.hpp"

namespace gql::exp {

using S2 = mmhd::State<2>;
using Dg2 = dg::MmhdDg<2>;

inline mmhd::MixtureSpec<2> blast_spec() { return {{2.42, 0.72}, {5.0 / 3.0, 1.4}}; }
inline mmhd::MixtureSpec<2> jet_spec() { return {{0.72, 2.42}, {1.4, 5.0 / 3.0}}; }

inline S2 mixture_state(double rho, double p, double y1, const Vec3& v, const Vec3& b,
                        const mmhd::MixtureSpec<2>& spec) {
  mmhd::Primitive<2> w;
  w.rho = rho;
  w.Y = {y1, 1.0 - y1};
  w.v = v;
  w.B = b;
  w.p = p;
  return mmhd::to_conserved<2>(w, spec);
}

inline Grid2d<S2> box_grid(const RunConfig& c) {
  Grid2d<S2> g;
  g.nx = c.nx, g.ny = c.ny;
  g.dx = (c.x1 - c.x0) / c.nx, g.dy = (c.y1 - c.y0) / c.ny;
  g.x0 = c.x0, g.y0 = c.y0;
  return g;
}

inline dg::DgOptions dg_options(const RunConfig& c) {
  dg::DgOptions o;
  o.cfl = c.cfl;
  o.source_term = c.source_term;
  o.pp_limiter = c.limiter;
  o.tvb_m = c.tvb;
  return o;
}

struct Problem {
  Dg2 solver;
  std::function<S2(double, double)> init;
};

inline Problem blast(const RunConfig& c) {
  auto g = box_grid(c);
  for (auto& b : g.bc) b = SideBc<S2>::outflow();
  auto spec = blast_spec();
  const Vec3 b{100.0 / std::sqrt(4.0 * std::numbers::pi), 0.0, 0.0};
  S2 inner = mixture_state(1.0, 1000.0, 1.0, {0, 0, 0}, b, spec);
  S2 outer = mixture_state(1.0, 0.1, 0.0, {0, 0, 0}, b, spec);
  return {Dg2(g, spec, dg_options(c)),
          [=](double x, double y) { return x * x + y * y <= 0.01 ? inner : outer; }};
}

// Half-plane jet: mirror symmetry at x = 0, inlet on the bottom for x < 0.05.
inline Problem jet(const RunConfig& c) {
  using L = mmhd::Layout<2>;
  auto g = box_grid(c);
  auto spec = jet_spec();
  const Vec3 b{0.0, std::sqrt(4000.0), 0.0};
  S2 ambient = mixture_state(0.14, 1.0, 0.0, {0, 0, 0}, b, spec);
  S2 inlet = mixture_state(1.4, 1.0, 1.0, {0, 800.0, 0}, b, spec);
  g.bc[kLeft] = SideBc<S2>::custom([](const S2& u, double) {
    S2 r = u;
    r[L::kMom] = -r[L::kMom];
    r[L::kMag] = -r[L::kMag];
    return r;
  });
  g.bc[kRight] = SideBc<S2>::outflow();
  g.bc[kTop] = SideBc<S2>::outflow();
  g.bc[kBottom] = SideBc<S2>::custom([=](const S2& u, double x) { return x < 0.05 ? inlet : u; });
  return {Dg2(g, spec, dg_options(c)), [=](double, double) { return ambient; }};
}

template <int NC>
std::vector<mmhd::State<NC>> averages(const std::vector<dg::Cell<NC>>& f) {
  std::vector<mmhd::State<NC>> out(f.size());
  for (std::size_t c = 0; c < f.size(); ++c) out[c] = f[c].mean();
  return out;
}

template <int NC>
mmhd::State<NC> total(const std::vector<dg::Cell<NC>>& f) {
  mmhd::State<NC> s{};
  for (const auto& c : f) {
    auto m = c.mean();
    for (int v = 0; v < mmhd::Layout<NC>::kVars; ++v) s[v] += m[v];
  }
  return s;
}

template <int NC>
struct DgRun {
  long steps = 0;
  double t = 0.0;
  bool violation = false;
  std::string witness;
  double max_div_minus = 0.0;
  mmhd::State<NC> source_total{};  // summed over steps, in cell-average units
  std::vector<io::BoundsRecord> bounds;
  std::vector<io::CflRecord> cfl;
};

// Advances a limited field to t_end; `on_step(step, t, field)` runs after
// every accepted step.
template <int NC, class OnStep>
DgRun<NC> run_dg(const dg::MmhdDg<NC>& s, std::vector<dg::Cell<NC>>& f, double t_end,
                 long max_steps, OnStep&& on_step) {
  DgRun<NC> run;
  while (run.t < t_end && (max_steps <= 0 || run.steps < max_steps)) {
    auto rep = s.step(f, t_end - run.t);
    ++run.steps;
    if (rep.violation) {
      run.violation = true;
      run.witness = "step " + std::to_string(run.steps) + ": " + rep.witness;
      return run;
    }
    run.t = (t_end - run.t <= rep.dt) ? t_end : run.t + rep.dt;
    io::BoundsRecord b;
    b.step = run.steps, b.t = run.t, b.dt = rep.dt;
    b.min_rho = rep.min_rho, b.min_p = rep.min_p;
    b.min_Y = NC > 1 ? rep.min_Y : 1.0;
    b.max_Y = NC > 1 ? rep.max_Y : 1.0;
    io::CflRecord c;
    c.step = run.steps;
    c.lambda_eff = rep.lambda_eff;
    c.retries = rep.retries;
    for (const auto& st : rep.stages) {
      b.max_absdiv = std::max(b.max_absdiv, st.max_abs_div);
      b.eps = std::max(b.eps, st.eps);
      c.alpha1 = std::max(c.alpha1, st.alpha1);
      c.alpha2 = std::max(c.alpha2, st.alpha2);
    }
    c.max_div_minus = rep.max_div_minus;
    run.max_div_minus = std::max(run.max_div_minus, rep.max_div_minus);
    for (int v = 0; v < mmhd::Layout<NC>::kVars; ++v) run.source_total[v] += rep.source_total[v];
    run.bounds.push_back(b);
    run.cfl.push_back(c);
    on_step(run.steps, run.t, f);
  }
  return run;
}

}  // namespace gql::exp
