#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "flux.hpp"
#include "gasdyn.hpp"
#include "grid.hpp"
#include "mhd.hpp"
#include "moment.hpp"

namespace gql::fv {

template <class S>
S ghost_1d(const std::vector<S>& f, const Grid1d<S>& g, int i) {
  if (i >= 0 && i < g.n_cells) return f[i];
  if (g.left.kind == BoundaryKind::Periodic) return f[(i + g.n_cells) % g.n_cells];
  if (i < 0) return g.left.apply(f.front(), 0.0);
  return g.right.apply(f.back(), 0.0);
}

// Cell (i, j) with one layer of ghosts around the grid.
template <class S>
S ghost_2d(const std::vector<S>& f, const Grid2d<S>& g, int i, int j) {
  if (i < 0 || i >= g.nx) {
    int side = i < 0 ? kLeft : kRight;
    int ii = i < 0 ? 0 : g.nx - 1;
    if (g.bc[side].kind == BoundaryKind::Periodic) return f[g.index((i + g.nx) % g.nx, j)];
    return g.bc[side].apply(f[g.index(ii, j)], g.yc(j));
  }
  if (j < 0 || j >= g.ny) {
    int side = j < 0 ? kBottom : kTop;
    int jj = j < 0 ? 0 : g.ny - 1;
    if (g.bc[side].kind == BoundaryKind::Periodic) return f[g.index(i, (j + g.ny) % g.ny)];
    return g.bc[side].apply(f[g.index(i, jj)], g.xc(i));
  }
  return f[g.index(i, j)];
}

enum class FluxKind { LaxFriedrichs, GasKinetic };

namespace detail {

inline void monitor_euler(const gasdyn::State& u, std::size_t j, StepReport& rep) {
  rep.bound("density").add(u[0]);
  double e = u[0] > 0.0 ? gasdyn::internal_energy(u) : -std::numeric_limits<double>::infinity();
  rep.bound("internal_energy").add(e);
  if (!(u[0] > 0.0) || !(e > 0.0)) {
    std::ostringstream os;
    os << "cell " << j << " left the admissible set (rho=" << u[0] << ", rho e=" << e << ")";
    rep.flag(os.str());
  }
}

}  // namespace detail

using EulerField = std::vector<gasdyn::State>;

inline double euler_alpha(const EulerField& f, const Grid1d<gasdyn::State>& g, double gamma) {
  double a = 0.0;
  for (int j = -1; j <= g.n_cells; ++j) a = std::max(a, gasdyn::wave_speed(ghost_1d(f, g, j), gamma));
  return a;
}

// Interface fluxes f_{j+1/2} for j = -1 .. n-1.
inline std::vector<gasdyn::State> euler_interface_fluxes(const EulerField& f,
                                                         const Grid1d<gasdyn::State>& g,
                                                         FluxKind kind, double alpha,
                                                         double gamma) {
  std::vector<gasdyn::State> fh(g.n_cells + 1);
  auto phys = [gamma](const gasdyn::State& u) { return gasdyn::flux(u, gamma); };
  for (int j = -1; j < g.n_cells; ++j) {
    gasdyn::State ul = ghost_1d(f, g, j), ur = ghost_1d(f, g, j + 1);
    fh[j + 1] = kind == FluxKind::LaxFriedrichs ? lf_flux(ul, ur, phys, alpha)
                                                : kinetic::flux(ul, ur, gamma);
  }
  return fh;
}

inline std::pair<EulerField, StepReport> step_euler_1d(
    const EulerField& f, const Grid1d<gasdyn::State>& g, FluxKind kind, double cfl,
    double gamma = 1.4, double max_dt = std::numeric_limits<double>::infinity()) {
  g.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw UsageError("step_euler_1d: cfl must be in (0, 1]");
  if (f.size() != std::size_t(g.n_cells)) throw UsageError("step_euler_1d: field size mismatch");
  StepReport rep;
  double alpha = euler_alpha(f, g, gamma);
  rep.alpha = {alpha, 0.0};
  rep.dt = std::min(cfl * g.dx / alpha, max_dt);
  double sigma = rep.dt / g.dx;
  auto fh = euler_interface_fluxes(f, g, kind, alpha, gamma);
  EulerField out(f.size());
  for (int j = 0; j < g.n_cells; ++j) {
    for (int c = 0; c < 3; ++c) out[j][c] = f[j][c] - sigma * (fh[j + 1][c] - fh[j][c]);
    detail::monitor_euler(out[j], j, rep);
  }
  return {std::move(out), rep};
}

// Time step satisfying the viscous restriction with safety factor cfl.
inline double ns_time_step(const EulerField& f, const Grid1d<gasdyn::State>& g,
                           const gasdyn::NsParams& prm, double alpha, double cfl) {
  double diff = 0.0;
  for (const auto& u : f) diff = std::max(diff, gasdyn::diffusion_number(u, prm));
  return cfl / (alpha / g.dx + diff / (g.dx * g.dx));
}

inline std::pair<EulerField, StepReport> step_ns_1d(
    const EulerField& f, const Grid1d<gasdyn::State>& g, const gasdyn::NsParams& prm,
    double cfl, FluxKind kind = FluxKind::LaxFriedrichs,
    double max_dt = std::numeric_limits<double>::infinity()) {
  g.validate();
  prm.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw UsageError("step_ns_1d: cfl must be in (0, 1]");
  if (f.size() != std::size_t(g.n_cells)) throw UsageError("step_ns_1d: field size mismatch");
  StepReport rep;
  double alpha = euler_alpha(f, g, prm.gamma);
  rep.alpha = {alpha, 0.0};
  rep.dt = std::min(ns_time_step(f, g, prm, alpha, cfl), max_dt);
  double sigma = rep.dt / g.dx;
  double nu = rep.dt / (g.dx * g.dx) * prm.eta / prm.reynolds;
  auto fh = euler_interface_fluxes(f, g, kind, alpha, prm.gamma);
  std::vector<gasdyn::State> r(g.n_cells + 2);
  for (int j = -1; j <= g.n_cells; ++j) r[j + 1] = gasdyn::viscous_vector(ghost_1d(f, g, j), prm);
  EulerField out(f.size());
  for (int j = 0; j < g.n_cells; ++j) {
    for (int c = 0; c < 3; ++c) {
      double h = r[j + 2][c] - 2.0 * r[j + 1][c] + r[j][c];
      out[j][c] = f[j][c] - sigma * (fh[j + 1][c] - fh[j][c]) + nu * h;
    }
    detail::monitor_euler(out[j], j, rep);
  }
  return {std::move(out), rep};
}

using TenMomentField = std::vector<tenmoment::State>;

inline constexpr double kTenMomentMaxCfl = 1.0 - 1e-12;

inline std::pair<TenMomentField, StepReport> step_tenmoment_2d(
    const TenMomentField& f, const Grid2d<tenmoment::State>& g, double cfl,
    double max_dt = std::numeric_limits<double>::infinity()) {
  using tenmoment::State;
  g.validate();
  if (!(cfl > 0.0 && cfl <= kTenMomentMaxCfl))
    throw UsageError("step_tenmoment_2d: cfl must be in (0, 1 - 1e-12]");
  if (f.size() != g.cells()) throw UsageError("step_tenmoment_2d: field size mismatch");
  StepReport rep;
  double a1 = 0.0, a2 = 0.0;
  for (int j = -1; j <= g.ny; ++j)
    for (int i = -1; i <= g.nx; ++i) {
      bool corner = (i < 0 || i >= g.nx) && (j < 0 || j >= g.ny);
      if (corner) continue;
      State u = ghost_2d(f, g, i, j);
      a1 = std::max(a1, tenmoment::wave_speed(u, 0));
      a2 = std::max(a2, tenmoment::wave_speed(u, 1));
    }
  rep.alpha = {a1, a2};
  rep.dt = std::min(cfl / (a1 / g.dx + a2 / g.dy), max_dt);
  double s1 = rep.dt / g.dx, s2 = rep.dt / g.dy;
  auto fx = [](const State& u) { return tenmoment::flux(u, 0); };
  auto fy = [](const State& u) { return tenmoment::flux(u, 1); };
  // x-interfaces (i+1/2, j) for i = -1..nx-1 and y-interfaces likewise.
  std::vector<State> hx(std::size_t(g.nx + 1) * g.ny), hy(std::size_t(g.ny + 1) * g.nx);
  for (int j = 0; j < g.ny; ++j)
    for (int i = -1; i < g.nx; ++i)
      hx[std::size_t(j) * (g.nx + 1) + (i + 1)] =
          lf_flux(ghost_2d(f, g, i, j), ghost_2d(f, g, i + 1, j), fx, a1);
  for (int j = -1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      hy[std::size_t(j + 1) * g.nx + i] =
          lf_flux(ghost_2d(f, g, i, j), ghost_2d(f, g, i, j + 1), fy, a2);
  TenMomentField out(f.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const State& u = f[g.index(i, j)];
      const State& xl = hx[std::size_t(j) * (g.nx + 1) + i];
      const State& xr = hx[std::size_t(j) * (g.nx + 1) + i + 1];
      const State& yl = hy[std::size_t(j) * g.nx + i];
      const State& yr = hy[std::size_t(j + 1) * g.nx + i];
      State& w = out[g.index(i, j)];
      for (int c = 0; c < 6; ++c) w[c] = u[c] - s1 * (xr[c] - xl[c]) - s2 * (yr[c] - yl[c]);
      rep.bound("density").add(w[0]);
      double lam = w[0] > 0.0 ? tenmoment::min_eigenvalue(tenmoment::reduced_energy(w))
                              : -std::numeric_limits<double>::infinity();
      rep.bound("min_eigenvalue").add(lam);
      if (!(w[0] > 0.0) || !(lam > 0.0)) {
        std::ostringstream os;
        os << "cell (" << i << "," << j << ") lost positive definiteness (rho=" << w[0]
           << ", lambda_min=" << lam << ")";
        rep.flag(os.str());
      }
    }
  return {std::move(out), rep};
}

// Central discrete divergence of the cell-average field.
template <int NC>
double central_divergence(const std::vector<mmhd::State<NC>>& f,
                          const Grid2d<mmhd::State<NC>>& g, int i, int j) {
  constexpr int b = mmhd::Layout<NC>::kMag;
  return (ghost_2d(f, g, i + 1, j)[b] - ghost_2d(f, g, i - 1, j)[b]) / (2.0 * g.dx) +
         (ghost_2d(f, g, i, j + 1)[b + 1] - ghost_2d(f, g, i, j - 1)[b + 1]) / (2.0 * g.dy);
}

struct MmhdFirstOrderOptions {
  double cfl = 0.9;
  int probes = 100;
  std::uint64_t seed = 0;
  double max_dt = std::numeric_limits<double>::infinity();
};

// Probe (v*, B*) for the first-order inequality audit: half close to the
// minimizer of the updated state, half spread widely.
template <int NC>
void audit_probe(const mmhd::State<NC>& u, std::mt19937_64& rng, int k, double* vs, double* bs) {
  using L = mmhd::Layout<NC>;
  std::normal_distribution<double> nd(0.0, 1.0);
  double rho = u[L::kRho];
  double vn = 0.0, bn = 0.0;
  for (int i = 0; i < 3; ++i) {
    vn += u[L::kMom + i] * u[L::kMom + i];
    bn += u[L::kMag + i] * u[L::kMag + i];
  }
  vn = std::sqrt(vn) / rho;
  bn = std::sqrt(bn);
  double spread = k % 2 == 0 ? 0.1 : 3.0;
  for (int i = 0; i < 3; ++i) {
    vs[i] = u[L::kMom + i] / rho + spread * (1.0 + vn) * nd(rng);
    bs[i] = u[L::kMag + i] + spread * (1.0 + bn) * nd(rng);
  }
}

template <int NC>
std::pair<std::vector<mmhd::State<NC>>, StepReport> step_mmhd_first_order(
    const std::vector<mmhd::State<NC>>& f, const Grid2d<mmhd::State<NC>>& g,
    const mmhd::MixtureSpec<NC>& spec, const MmhdFirstOrderOptions& opt = {}) {
  using S = mmhd::State<NC>;
  using L = mmhd::Layout<NC>;
  g.validate();
  spec.validate();
  if (!(opt.cfl > 0.0 && opt.cfl <= 1.0))
    throw UsageError("step_mmhd_first_order: cfl must be in (0, 1]");
  if (f.size() != g.cells()) throw UsageError("step_mmhd_first_order: field size mismatch");
  StepReport rep;
  double a1 = 0.0, a2 = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const S& u = f[g.index(i, j)];
      a1 = std::max({a1, mmhd::wave_speed<NC>(u, u, 0, spec),
                     mmhd::wave_speed<NC>(ghost_2d(f, g, i + 1, j), ghost_2d(f, g, i - 1, j), 0,
                                          spec)});
      a2 = std::max({a2, mmhd::wave_speed<NC>(u, u, 1, spec),
                     mmhd::wave_speed<NC>(ghost_2d(f, g, i, j + 1), ghost_2d(f, g, i, j - 1), 1,
                                          spec)});
    }
  rep.alpha = {a1, a2};
  rep.dt = std::min(opt.cfl / (a1 / g.dx + a2 / g.dy), opt.max_dt);
  double s1 = rep.dt / g.dx, s2 = rep.dt / g.dy;
  auto fx = [&spec](const S& u) { return mmhd::flux<NC>(u, 0, spec); };
  auto fy = [&spec](const S& u) { return mmhd::flux<NC>(u, 1, spec); };
  std::vector<S> hx(std::size_t(g.nx + 1) * g.ny), hy(std::size_t(g.ny + 1) * g.nx);
  for (int j = 0; j < g.ny; ++j)
    for (int i = -1; i < g.nx; ++i)
      hx[std::size_t(j) * (g.nx + 1) + (i + 1)] =
          lf_flux(ghost_2d(f, g, i, j), ghost_2d(f, g, i + 1, j), fx, a1);
  for (int j = -1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      hy[std::size_t(j + 1) * g.nx + i] =
          lf_flux(ghost_2d(f, g, i, j), ghost_2d(f, g, i, j + 1), fy, a2);
  std::vector<S> out(f.size());
  std::mt19937_64 rng(opt.seed);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const S& u = f[g.index(i, j)];
      const S& xl = hx[std::size_t(j) * (g.nx + 1) + i];
      const S& xr = hx[std::size_t(j) * (g.nx + 1) + i + 1];
      const S& yl = hy[std::size_t(j) * g.nx + i];
      const S& yr = hy[std::size_t(j + 1) * g.nx + i];
      S& w = out[g.index(i, j)];
      for (int c = 0; c < L::kVars; ++c) w[c] = u[c] - s1 * (xr[c] - xl[c]) - s2 * (yr[c] - yl[c]);
      double div = central_divergence<NC>(f, g, i, j);
      rep.max_abs_div = std::max(rep.max_abs_div, std::abs(div));
      rep.bound("density").add(w[L::kRho]);
      double rest = w[L::kRho];
      bool fractions_ok = true;
      for (int k = 0; k < NC - 1; ++k) {
        rep.bound("partial_density").add(w[k]);
        fractions_ok = fractions_ok && w[k] >= 0.0;
        rest -= w[k];
      }
      if (NC > 1) rep.bound("partial_density").add(rest);
      fractions_ok = fractions_ok && rest >= 0.0;
      if (!fractions_ok || !(w[L::kRho] > 0.0)) {
        std::ostringstream os;
        os << "cell (" << i << "," << j << ") density or partial density sign violated";
        rep.flag(os.str());
        continue;
      }
      double e = mmhd::internal_energy<NC>(w);
      rep.bound("internal_energy").add(e);
      if (!(e > 0.0)) {
        std::ostringstream os;
        os << "cell (" << i << "," << j << ") internal energy " << e << " (divergence " << div
           << ")";
        rep.flag(os.str());
      }
      for (int k = 0; k < opt.probes; ++k) {
        double vs[3], bs[3];
        audit_probe<NC>(w, rng, k, vs, bs);
        double lhs = mmhd::phi<NC>(StateView(w.data(), w.size()), vs, bs);
        double rhs = -rep.dt * (vs[0] * bs[0] + vs[1] * bs[1] + vs[2] * bs[2]) * div;
        ++rep.audit_checks;
        if (!(lhs > rhs)) {
          ++rep.audit_failures;
          std::ostringstream os;
          os << "cell (" << i << "," << j << ") v*=(" << vs[0] << "," << vs[1] << "," << vs[2]
             << ") B*=(" << bs[0] << "," << bs[1] << "," << bs[2] << ") phi=" << lhs
             << " bound=" << rhs;
          rep.flag(os.str());
        }
      }
    }
  return {std::move(out), rep};
}

}  // namespace gql::fv
