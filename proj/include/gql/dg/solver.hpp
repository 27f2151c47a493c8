#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "../flux.hpp"
#include "../grid.hpp"
#include "../limiter.hpp"
#include "../mhd.hpp"
#include "basis.hpp"
#include "cell.hpp"

namespace gql::dg {

struct DgOptions {
  double cfl = 0.15;
  bool source_term = true;
  bool pp_limiter = true;
  double tvb_m = -1.0;  // negative disables slope limiting
  int max_retries = 8;
};

// Diagnostics of one stage input: viscosities, jump bound, divergence.
struct StageInfo {
  double alpha1 = 0.0, alpha2 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
  double eps = 0.0;
  double max_div_minus = 0.0;
  double max_abs_div = 0.0;
};

struct Divergence {
  double minus = 0.0, plus = 0.0, mean = 0.0;
};

template <int NC>
struct DgStepReport {
  double dt = 0.0;
  int retries = 0;
  std::array<StageInfo, 3> stages{};
  double lambda_eff = 0.0;  // max over stages of (1 + eps) dt (a1/dx + a2/dy)
  bool violation = false;
  std::string witness;
  mmhd::State<NC> source_total{};  // dt-weighted sum of all cells' source means
  double max_div_minus = 0.0;
  double max_abs_div = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  double min_p = std::numeric_limits<double>::infinity();
  double min_Y = std::numeric_limits<double>::infinity();
  double max_Y = -std::numeric_limits<double>::infinity();
};

template <int NC>
double minmod(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
  return 0.0;
}

template <int NC>
class MmhdDg {
 public:
  using S = mmhd::State<NC>;
  using L = mmhd::Layout<NC>;
  using C = Cell<NC>;
  using Field = std::vector<C>;
  static constexpr int N = L::kVars;
  static constexpr int kB1 = L::kMag;
  static constexpr int kB2 = L::kMag + 1;

  // Traces at the twelve edge points of each cell: own values and the
  // neighbour (or ghost) values at the same physical points.
  struct Traces {
    std::vector<std::array<S, PointSets::kEdgePoints>> own, nbr;
  };

  MmhdDg(Grid2d<S> grid, mmhd::MixtureSpec<NC> spec, DgOptions opt = {})
      : grid_(std::move(grid)), spec_(spec), opt_(opt), tab_(grid_.dy / grid_.dx) {
    grid_.validate();
    spec_.validate();
    if (!(opt_.cfl > 0.0 && opt_.cfl <= 1.0)) throw UsageError("dg: cfl must be in (0, 1]");
  }

  const Grid2d<S>& grid() const { return grid_; }
  const mmhd::MixtureSpec<NC>& spec() const { return spec_; }
  const DgOptions& options() const { return opt_; }
  DgOptions& options() { return opt_; }
  const Tables& tables() const { return tab_; }

  // L2 projection of a conserved-state function using 3x3 Gauss points;
  // (B1, B2) is projected onto the divergence-free space.
  Field project(const std::function<S(double, double)>& init) const {
    Field f(grid_.cells());
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        C& cell = f[grid_.index(i, j)];
        for (int p = 0; p < PointSets::kVolumePoints; ++p) {
          double x = grid_.xc(i) + 0.5 * grid_.dx * tab_.points.volume[p][0];
          double y = grid_.yc(j) + 0.5 * grid_.dy * tab_.points.volume[p][1];
          S u = init(x, y);
          double w = tab_.points.volume_w[p];
          for (int v = 0; v < N; ++v)
            if (C::is_scalar(v))
              for (int m = 0; m < kModes; ++m) cell.c[v][m] += w * u[v] * tab_.volume.phi[p][m];
          for (int k = 0; k < kMagModes; ++k)
            cell.d[k] += w * (u[kB1] * tab_.volume.b1[p][k] + u[kB2] * tab_.volume.b2[p][k]);
        }
      }
    return f;
  }

  // Physical location of an edge point along its side.
  double edge_coordinate(int i, int j, int side, int q) const {
    double g = Quadrature::gauss_x[q];
    if (side == kLeft || side == kRight) return grid_.yc(j) + 0.5 * grid_.dy * g;
    return grid_.xc(i) + 0.5 * grid_.dx * g;
  }

  void compute_traces(const Field& f, Traces& t) const {
    t.own.resize(f.size());
    t.nbr.resize(f.size());
    for (std::size_t c = 0; c < f.size(); ++c)
      for (int p = 0; p < PointSets::kEdgePoints; ++p) t.own[c][p] = evaluate<NC>(f[c], tab_.limiter, p);
    fill_neighbours(t);
  }

  Traces traces(const Field& f) const {
    Traces t;
    compute_traces(f, t);
    return t;
  }

  void fill_neighbours(Traces& t) const {
    const int nx = grid_.nx, ny = grid_.ny;
    static constexpr int opposite[4] = {kRight, kLeft, kTop, kBottom};
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        std::size_t c = grid_.index(i, j);
        for (int side = 0; side < 4; ++side) {
          int ni = i + (side == kLeft ? -1 : side == kRight ? 1 : 0);
          int nj = j + (side == kBottom ? -1 : side == kTop ? 1 : 0);
          bool outside = ni < 0 || ni >= nx || nj < 0 || nj >= ny;
          const auto& bc = grid_.bc[side];
          for (int q = 0; q < 3; ++q) {
            int p = PointSets::edge_point(side, q);
            if (!outside) {
              t.nbr[c][p] = t.own[grid_.index(ni, nj)][PointSets::edge_point(opposite[side], q)];
            } else if (bc.kind == BoundaryKind::Periodic) {
              int pi = (ni + nx) % nx, pj = (nj + ny) % ny;
              t.nbr[c][p] = t.own[grid_.index(pi, pj)][PointSets::edge_point(opposite[side], q)];
            } else {
              t.nbr[c][p] = bc.apply(t.own[c][p], edge_coordinate(i, j, side, q));
            }
          }
        }
      }
  }

  StageInfo analyze(const Traces& t) const {
    StageInfo info;
    const auto& w = Quadrature::gauss_w;
    for (std::size_t c = 0; c < t.own.size(); ++c) {
      const auto& o = t.own[c];
      const auto& n = t.nbr[c];
      double dm = 0.0, jumps = 0.0;
      for (int q = 0; q < 3; ++q) {
        int pl = q, pr = 3 + q, pb = 6 + q, pt = 9 + q;
        info.alpha1 = std::max({info.alpha1, mmhd::wave_speed<NC>(o[pr], o[pl], 0, spec_),
                                mmhd::wave_speed<NC>(n[pr], n[pl], 0, spec_)});
        info.alpha2 = std::max({info.alpha2, mmhd::wave_speed<NC>(o[pt], o[pb], 1, spec_),
                                mmhd::wave_speed<NC>(n[pt], n[pb], 1, spec_)});
        double jr = n[pr][kB1] - o[pr][kB1], jl = o[pl][kB1] - n[pl][kB1];
        double jt = n[pt][kB2] - o[pt][kB2], jb = o[pb][kB2] - n[pb][kB2];
        auto rmax = [](const S& a, const S& b) {
          return std::sqrt(std::max(a[L::kRho], b[L::kRho]));
        };
        info.beta1 = std::max({info.beta1, std::abs(jr) * rmax(o[pr], n[pr]),
                               std::abs(jl) * rmax(o[pl], n[pl])});
        info.beta2 = std::max({info.beta2, std::abs(jt) * rmax(o[pt], n[pt]),
                               std::abs(jb) * rmax(o[pb], n[pb])});
        dm += w[q] * ((o[pr][kB1] - o[pl][kB1]) / grid_.dx + (o[pt][kB2] - o[pb][kB2]) / grid_.dy);
        jumps += w[q] * ((jr + jl) / grid_.dx + (jt + jb) / grid_.dy);
      }
      info.max_div_minus = std::max(info.max_div_minus, std::abs(dm));
      info.max_abs_div = std::max(info.max_abs_div, std::abs(dm + 0.5 * jumps));
    }
    info.eps = std::max(info.beta1 / info.alpha1, info.beta2 / info.alpha2);
    return info;
  }

  std::vector<Divergence> divergence(const Field& f) const {
    Traces t = traces(f);
    std::vector<Divergence> out(f.size());
    const auto& w = Quadrature::gauss_w;
    for (std::size_t c = 0; c < f.size(); ++c) {
      const auto& o = t.own[c];
      const auto& n = t.nbr[c];
      Divergence d;
      for (int q = 0; q < 3; ++q) {
        int pl = q, pr = 3 + q, pb = 6 + q, pt = 9 + q;
        d.minus += w[q] * ((o[pr][kB1] - o[pl][kB1]) / grid_.dx + (o[pt][kB2] - o[pb][kB2]) / grid_.dy);
        d.plus += w[q] * ((n[pr][kB1] - n[pl][kB1]) / grid_.dx + (n[pt][kB2] - n[pb][kB2]) / grid_.dy);
      }
      d.mean = 0.5 * (d.minus + d.plus);
      out[c] = d;
    }
    return out;
  }

  // Lax-Friedrichs fluxes at interface points: x-interfaces indexed by
  // (i + 1, j) for the interface right of cell i, y-interfaces likewise.
  struct InterfaceFluxes {
    std::vector<std::array<S, 3>> x, y;
  };

  InterfaceFluxes interface_fluxes(const Traces& t, const StageInfo& info) const {
    InterfaceFluxes h;
    interface_fluxes_into(t, info, h);
    return h;
  }

  void interface_fluxes_into(const Traces& t, const StageInfo& info, InterfaceFluxes& h) const {
    const int nx = grid_.nx, ny = grid_.ny;
    h.x.resize(std::size_t(nx + 1) * ny);
    h.y.resize(std::size_t(ny + 1) * nx);
    auto lf = [&](const S& a, const S& b, int dir, double alpha) {
      S fa = mmhd::flux<NC>(a, dir, spec_), fb = mmhd::flux<NC>(b, dir, spec_);
      S r;
      for (int v = 0; v < N; ++v) r[v] = 0.5 * (fa[v] + fb[v] - alpha * (b[v] - a[v]));
      return r;
    };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        std::size_t c = grid_.index(i, j);
        for (int q = 0; q < 3; ++q) {
          h.x[std::size_t(j) * (nx + 1) + i + 1][q] = lf(t.own[c][3 + q], t.nbr[c][3 + q], 0, info.alpha1);
          if (i == 0) h.x[std::size_t(j) * (nx + 1)][q] = lf(t.nbr[c][q], t.own[c][q], 0, info.alpha1);
          h.y[std::size_t(j + 1) * nx + i][q] = lf(t.own[c][9 + q], t.nbr[c][9 + q], 1, info.alpha2);
          if (j == 0) h.y[i][q] = lf(t.nbr[c][6 + q], t.own[c][6 + q], 1, info.alpha2);
        }
      }
  }

  // Time derivative of all modal coefficients. `source_mean` receives the sum
  // over cells of the source contribution to the cell-average equation.
  Field residual(const Field& f, const Traces& t, const StageInfo& info,
                 S* source_mean = nullptr) const {
    Field R;
    residual_into(f, t, info, R, source_mean);
    return R;
  }

  void residual_into(const Field& f, const Traces& t, const StageInfo& info, Field& R,
                     S* source_mean) const {
    const int nx = grid_.nx, ny = grid_.ny;
    const double idx = 1.0 / grid_.dx, idy = 1.0 / grid_.dy;
    const double sx = 2.0 * idx, sy = 2.0 * idy;
    const auto& w = Quadrature::gauss_w;
    InterfaceFluxes& h = work_.h;
    interface_fluxes_into(t, info, h);
    R.assign(f.size(), C{});
    S src_total{};
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        std::size_t c = grid_.index(i, j);
        const C& cell = f[c];
        C& r = R[c];
        // Volume terms.
        for (int p = 0; p < PointSets::kVolumePoints; ++p) {
          S u = evaluate<NC>(cell, tab_.volume, p);
          double pu = mmhd::pressure<NC>(u, spec_);
          S f1 = mmhd::flux_with_pressure<NC>(u, 0, pu);
          S f2 = mmhd::flux_with_pressure<NC>(u, 1, pu);
          double wp = tab_.points.volume_w[p];
          const auto& gx = tab_.dphi_x[p];
          const auto& gy = tab_.dphi_y[p];
          for (int v = 0; v < N; ++v) {
            if (!C::is_scalar(v)) continue;
            double a = wp * sx * f1[v], b = wp * sy * f2[v];
            for (int m = 1; m < kModes; ++m) r.c[v][m] += a * gx[m] + b * gy[m];
          }
          double a1 = wp * sx * f1[kB1], b1 = wp * sy * f2[kB1];
          double a2 = wp * sx * f1[kB2], b2 = wp * sy * f2[kB2];
          for (int k = 2; k < kMagModes; ++k)
            r.d[k] += a1 * tab_.db1_x[p][k] + b1 * tab_.db1_y[p][k] + a2 * tab_.db2_x[p][k] +
                      b2 * tab_.db2_y[p][k];
        }
        // Edge fluxes and source jumps.
        const auto& o = t.own[c];
        const auto& n = t.nbr[c];
        for (int side = 0; side < 4; ++side) {
          bool xdir = side == kLeft || side == kRight;
          double sign = (side == kRight || side == kTop) ? -1.0 : 1.0;
          double scale = xdir ? idx : idy;
          for (int q = 0; q < 3; ++q) {
            int p = PointSets::edge_point(side, q);
            const S& fh = xdir ? h.x[std::size_t(j) * (nx + 1) + i + (side == kRight ? 1 : 0)][q]
                               : h.y[std::size_t(j + (side == kTop ? 1 : 0)) * nx + i][q];
            // -(1/dx) [F_R phi(1) - F_L phi(-1)] over the edge.
            S tot;
            for (int v = 0; v < N; ++v) tot[v] = sign * scale * w[q] * fh[v];
            if (opt_.source_term) {
              int bn = xdir ? kB1 : kB2;
              double jump = (side == kRight || side == kTop) ? n[p][bn] - o[p][bn]
                                                             : o[p][bn] - n[p][bn];
              if (jump != 0.0) {
                S s = mmhd::godunov_source<NC>(o[p]);
                double k = -0.5 * scale * w[q] * jump;
                for (int v = 0; v < N; ++v) {
                  tot[v] += k * s[v];
                  src_total[v] += k * s[v];
                }
              }
            }
            const auto& ph = tab_.limiter.phi[p];
            for (int v = 0; v < N; ++v) {
              if (!C::is_scalar(v)) continue;
              for (int m = 0; m < kModes; ++m) r.c[v][m] += tot[v] * ph[m];
            }
            const auto& p1 = tab_.limiter.b1[p];
            const auto& p2 = tab_.limiter.b2[p];
            for (int k = 0; k < kMagModes; ++k) r.d[k] += tot[kB1] * p1[k] + tot[kB2] * p2[k];
          }
        }
      }
    if (source_mean) *source_mean = src_total;
  }

  // Cell averages after one forward-Euler step, evaluated directly from the
  // traces without the modal machinery.
  std::vector<S> step_cell_averages(const Field& f, double dt) const {
    Traces t = traces(f);
    StageInfo info = analyze(t);
    InterfaceFluxes h = interface_fluxes(t, info);
    const int nx = grid_.nx, ny = grid_.ny;
    const double s1 = dt / grid_.dx, s2 = dt / grid_.dy;
    const auto& w = Quadrature::gauss_w;
    std::vector<S> out(f.size());
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        std::size_t c = grid_.index(i, j);
        S u = f[c].mean();
        S shat{};
        const auto& o = t.own[c];
        const auto& n = t.nbr[c];
        for (int q = 0; q < 3; ++q) {
          const S& fr = h.x[std::size_t(j) * (nx + 1) + i + 1][q];
          const S& fl = h.x[std::size_t(j) * (nx + 1) + i][q];
          const S& gt = h.y[std::size_t(j + 1) * nx + i][q];
          const S& gb = h.y[std::size_t(j) * nx + i][q];
          for (int v = 0; v < N; ++v) u[v] -= w[q] * (s1 * (fr[v] - fl[v]) + s2 * (gt[v] - gb[v]));
          if (opt_.source_term) {
            int pl = q, pr = 3 + q, pb = 6 + q, pt = 9 + q;
            double jr = n[pr][kB1] - o[pr][kB1], jl = o[pl][kB1] - n[pl][kB1];
            double jt = n[pt][kB2] - o[pt][kB2], jb = o[pb][kB2] - n[pb][kB2];
            S sr = mmhd::godunov_source<NC>(o[pr]), sl = mmhd::godunov_source<NC>(o[pl]);
            S st = mmhd::godunov_source<NC>(o[pt]), sb = mmhd::godunov_source<NC>(o[pb]);
            for (int v = 0; v < N; ++v)
              shat[v] += 0.5 * s1 * w[q] * (jr * sr[v] + jl * sl[v]) +
                         0.5 * s2 * w[q] * (jt * st[v] + jb * sb[v]);
          }
        }
        for (int v = 0; v < N; ++v) u[v] -= shat[v];
        out[c] = u;
      }
    return out;
  }

  S ghost_mean(const Field& f, int i, int j) const {
    const int nx = grid_.nx, ny = grid_.ny;
    if (i >= 0 && i < nx && j >= 0 && j < ny) return f[grid_.index(i, j)].mean();
    int side = i < 0 ? kLeft : i >= nx ? kRight : j < 0 ? kBottom : kTop;
    const auto& bc = grid_.bc[side];
    int ci = std::clamp(i, 0, nx - 1), cj = std::clamp(j, 0, ny - 1);
    if (bc.kind == BoundaryKind::Periodic) return f[grid_.index((i + nx) % nx, (j + ny) % ny)].mean();
    double s = (side == kLeft || side == kRight) ? grid_.yc(cj) : grid_.xc(ci);
    return bc.apply(f[grid_.index(ci, cj)].mean(), s);
  }

  // Minmod slope limiting of one cell with TVB threshold M dx^2 per
  // direction; the magnetic pair shares one factor on its divergence-free
  // coefficients. Only non-mean coefficients change, so neighbours' means
  // may be read while limiting in place.
  void tvb_cell(Field& f, int i, int j, double mtvb) const {
    const double s3 = std::sqrt(3.0);
    C& cell = f[grid_.index(i, j)];
    S um = cell.mean();
    S ul = ghost_mean(f, i - 1, j), ur = ghost_mean(f, i + 1, j);
    S ub = ghost_mean(f, i, j - 1), ut = ghost_mean(f, i, j + 1);
    double tx = mtvb * grid_.dx * grid_.dx, ty = mtvb * grid_.dy * grid_.dy;
    auto lim = [](double s, double dp, double dmn, double thr) {
      if (std::abs(s) <= thr) return s;
      return minmod<NC>(s, dp, dmn);
    };
    for (int v = 0; v < N; ++v) {
      if (!C::is_scalar(v)) continue;
      auto& c = cell.c[v];
      double sxv = s3 * c[1], syv = s3 * c[2];
      double mx = lim(sxv, ur[v] - um[v], um[v] - ul[v], tx);
      double my = lim(syv, ut[v] - um[v], um[v] - ub[v], ty);
      bool fx = mx != sxv, fy = my != syv;
      if (fx) c[1] = mx / s3, c[3] = 0.0;
      if (fy) c[2] = my / s3, c[5] = 0.0;
      if (fx || fy) c[4] = 0.0;
    }
    double theta = 1.0;
    for (int comp = 0; comp < 2; ++comp) {
      const auto& leg = comp == 0 ? tab_.leg1 : tab_.leg2;
      int v = comp == 0 ? kB1 : kB2;
      double cx = 0.0, cy = 0.0;
      for (int k = 0; k < kMagModes; ++k) {
        cx += cell.d[k] * leg[k][1];
        cy += cell.d[k] * leg[k][2];
      }
      double sxv = s3 * cx, syv = s3 * cy;
      double mx = lim(sxv, ur[v] - um[v], um[v] - ul[v], tx);
      double my = lim(syv, ut[v] - um[v], um[v] - ub[v], ty);
      if (mx != sxv) theta = std::min(theta, sxv != 0.0 ? mx / sxv : 0.0);
      if (my != syv) theta = std::min(theta, syv != 0.0 ? my / syv : 0.0);
    }
    theta = std::max(theta, 0.0);
    if (theta < 1.0)
      for (int k = 2; k < kMagModes; ++k) cell.d[k] *= theta;
  }

  void tvb_limit(Field& f, double mtvb) const {
    if (mtvb < 0.0) return;
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) tvb_cell(f, i, j, mtvb);
  }

  void pp_limit(Field& f) const {
    for (auto& cell : f) limiter::scale_limit<NC>(cell, tab_.limiter);
  }

  void limit(Field& f) const {
    tvb_limit(f, opt_.tvb_m);
    if (opt_.pp_limiter) pp_limit(f);
  }

  // Limits every cell and evaluates the traces of the limited field.
  void limit_and_trace(Field& f, Traces& t) const {
    t.own.resize(f.size());
    t.nbr.resize(f.size());
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        std::size_t c = grid_.index(i, j);
        if (opt_.tvb_m >= 0.0) tvb_cell(f, i, j, opt_.tvb_m);
        if (opt_.pp_limiter) limiter::scale_limit<NC>(f[c], tab_.limiter);
        for (int p = 0; p < PointSets::kEdgePoints; ++p) t.own[c][p] = evaluate<NC>(f[c], tab_.limiter, p);
      }
    fill_neighbours(t);
  }

  // Exact-sign admissibility of cell averages; returns a witness or "".
  std::string check_averages(const Field& f, DgStepReport<NC>& rep, int stage) const {
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        S u = f[grid_.index(i, j)].mean();
        double rho = u[L::kRho];
        rep.min_rho = std::min(rep.min_rho, rho);
        bool ok = mmhd::admissible<NC>(u);
        if (rho > 0.0) {
          auto y = mmhd::mass_fractions<NC>(u);
          for (double yk : y) {
            rep.min_Y = std::min(rep.min_Y, yk);
            rep.max_Y = std::max(rep.max_Y, yk);
          }
          double e = mmhd::internal_energy<NC>(u);
          if (ok) rep.min_p = std::min(rep.min_p, mmhd::pressure<NC>(u, spec_));
          else rep.min_p = std::min(rep.min_p, e);
        }
        if (!ok) {
          std::ostringstream os;
          os << "stage " << stage << " cell (" << i << "," << j << ") average left the admissible set";
          return os.str();
        }
      }
    return {};
  }

  double max_dt(const StageInfo& info) const {
    return opt_.cfl * kOmegaHat1 /
           ((1.0 + info.eps) * (info.alpha1 / grid_.dx + info.alpha2 / grid_.dy));
  }

  // One SSP-RK3 step with limiting after every stage. The input must be
  // limited already. dt shrinks and the step re-runs when a later stage
  // violates the epsilon-aware CFL bound.
  DgStepReport<NC> step(Field& u, double dt_cap = std::numeric_limits<double>::infinity()) const {
    static constexpr double a_old[3] = {0.0, 0.75, 1.0 / 3.0};
    static constexpr double b_new[3] = {1.0, 0.25, 2.0 / 3.0};
    static constexpr double weight[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
    Work& w = work_;
    w.a.resize(u.size());
    w.b.resize(u.size());
    compute_traces(u, w.tr);
    const StageInfo i0 = analyze(w.tr);
    double dt = std::min(max_dt(i0), dt_cap);
    for (int attempt = 0; attempt <= opt_.max_retries; ++attempt) {
      DgStepReport<NC> r;
      r.dt = dt;
      r.retries = attempt;
      if (attempt > 0) compute_traces(u, w.tr);
      const Field* cur = &u;
      StageInfo is = i0;
      bool restart = false;
      for (int s = 0; s < 3; ++s) {
        if (s > 0) is = analyze(w.tr);
        r.stages[s] = is;
        double lam_eff = (1.0 + is.eps) * dt * (is.alpha1 / grid_.dx + is.alpha2 / grid_.dy);
        r.lambda_eff = std::max(r.lambda_eff, lam_eff);
        r.max_div_minus = std::max(r.max_div_minus, is.max_div_minus);
        r.max_abs_div = std::max(r.max_abs_div, is.max_abs_div);
        if (lam_eff > kOmegaHat1) {
          dt = std::min(dt, max_dt(is));
          restart = true;
          break;
        }
        S src{};
        residual_into(*cur, w.tr, is, w.R, &src);
        for (int v = 0; v < N; ++v) r.source_total[v] += dt * weight[s] * src[v];
        Field& next = s == 1 ? w.b : w.a;
        for (std::size_t c = 0; c < u.size(); ++c) {
          const C& u0 = u[c];
          const C& us = (*cur)[c];
          const C& rc = w.R[c];
          C& nc = next[c];
          for (int v = 0; v < N; ++v)
            for (int m = 0; m < kModes; ++m)
              nc.c[v][m] = a_old[s] * u0.c[v][m] + b_new[s] * (us.c[v][m] + dt * rc.c[v][m]);
          for (int k = 0; k < kMagModes; ++k)
            nc.d[k] = a_old[s] * u0.d[k] + b_new[s] * (us.d[k] + dt * rc.d[k]);
        }
        std::string bad = check_averages(next, r, s + 1);
        if (!bad.empty()) {
          r.violation = true;
          r.witness = bad;
          u = next;
          return r;
        }
        try {
          limit_and_trace(next, w.tr);
        } catch (const DomainError& e) {
          r.violation = true;
          r.witness = std::string("limiter: ") + e.what();
          u = next;
          return r;
        }
        cur = &next;
      }
      if (restart) continue;
      std::swap(u, w.a);
      return r;
    }
    DgStepReport<NC> r;
    r.violation = true;
    r.witness = "cfl retries exhausted";
    return r;
  }

 private:
  struct Work {
    Traces tr;
    InterfaceFluxes h;
    Field R, a, b;
  };

  Grid2d<S> grid_;
  mmhd::MixtureSpec<NC> spec_;
  DgOptions opt_;
  Tables tab_;
  mutable Work work_;  // scratch buffers; one solver object serves one thread
};

}  // namespace gql::dg
