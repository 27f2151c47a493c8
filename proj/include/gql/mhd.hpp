#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"
#include "vec.hpp"

namespace gql::ideal_mhd {

// State (rho, m, B, E).
using State = std::array<double, 8>;

inline double g(StateView u) {
  if (!(u[0] > 0.0)) throw DomainError("mhd: non-positive density");
  double m2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
  double b2 = u[4] * u[4] + u[5] * u[5] + u[6] * u[6];
  return u[7] - 0.5 * m2 / u[0] - 0.5 * b2;
}

inline InvariantRegion region() {
  return InvariantRegion(8, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
                             {"internal_energy", [](StateView u) { return g(u); },
                              Strictness::Strict}});
}

// phi(u; v*, B*) = u . n* + |B*|^2/2 with n* = (|v*|^2/2, -v*, -B*, 1); the
// density sits at index `offset` of a longer state.
inline double phi(StateView u, const double* vs, const double* bs, std::size_t offset = 0) {
  const double* x = u.data() + offset;
  double v2 = vs[0] * vs[0] + vs[1] * vs[1] + vs[2] * vs[2];
  double b2 = bs[0] * bs[0] + bs[1] * bs[1] + bs[2] * bs[2];
  double r = 0.5 * v2 * x[0] + x[7] + 0.5 * b2;
  for (int i = 0; i < 3; ++i) r -= x[1 + i] * vs[i] + x[4 + i] * bs[i];
  return r;
}

inline ScaleFn velocity_scale(std::size_t offset = 0) {
  return [offset](StateView u) {
    const double* x = u.data() + offset;
    double r = std::abs(x[0]);
    double m = std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    return 1.0 + (r > 0.0 ? m / r : m);
  };
}

inline ScaleFn field_scale(std::size_t offset = 0) {
  return [offset](StateView u) {
    const double* x = u.data() + offset;
    return 1.0 + std::sqrt(x[4] * x[4] + x[5] * x[5] + x[6] * x[6]);
  };
}

inline LinearConstraint energy_constraint(std::size_t offset = 0) {
  return {"internal_energy",
          [offset](StateView u, ThetaView th) { return phi(u, th.data(), th.data() + 3, offset); },
          AuxDomain::real_line(3, velocity_scale(offset)) *
              AuxDomain::real_line(3, field_scale(offset)),
          Strictness::Strict,
          [offset](StateView u) -> std::vector<double> {
            const double* x = u.data() + offset;
            if (!(x[0] > 0.0)) throw DomainError("density");
            return {x[1] / x[0], x[2] / x[0], x[3] / x[0], x[4], x[5], x[6]};
          },
          MinimizerRole::Exact};
}

inline GqlRepresentation gql() {
  LinearConstraint dens{"density", [](StateView u, ThetaView) { return u[0]; },
                        AuxDomain::none(), Strictness::Strict, {}, MinimizerRole::Exact};
  return GqlRepresentation(8, {dens, energy_constraint()});
}

// Boundary states (p = 0) parameterized by (rho*, v*, B*).
inline State boundary_state(double rho_s, const Vec3& vs, const Vec3& bs) {
  return {rho_s,  rho_s * vs[0], rho_s * vs[1], rho_s * vs[2], bs[0], bs[1], bs[2],
          0.5 * (rho_s * norm2(vs) + norm2(bs))};
}

inline State normal(const Vec3& vs, const Vec3& bs) {
  return {0.5 * norm2(vs), -vs[0], -vs[1], -vs[2], -bs[0], -bs[1], -bs[2], 1.0};
}

}  // namespace gql::ideal_mhd

namespace gql::mmhd {

// Multicomponent ideal MHD in a 2D setting with 3-vector fields. State layout:
// (rho Y_1, ..., rho Y_{NC-1}, rho, m_1, m_2, m_3, B_1, B_2, B_3, E).
template <int NC>
struct Layout {
  static_assert(NC >= 1, "need at least one species");
  static constexpr int kVars = NC + 7;
  static constexpr int kRho = NC - 1;
  static constexpr int kMom = NC;
  static constexpr int kMag = NC + 3;
  static constexpr int kEnergy = NC + 6;
};

template <int NC>
using State = std::array<double, NC + 7>;

template <int NC>
struct MixtureSpec {
  std::array<double, NC> cv;
  std::array<double, NC> gamma;

  void validate() const {
    for (int k = 0; k < NC; ++k) {
      if (!(cv[k] > 0.0)) throw UsageError("mixture: heat capacities must be positive");
      if (!(gamma[k] > 1.0)) throw UsageError("mixture: adiabatic indices must exceed 1");
    }
  }
};

template <int NC>
struct Primitive {
  double rho;
  Vec3 v;
  Vec3 B;
  double p;
  std::array<double, NC> Y;
};

// Full mass-fraction vector, the last entry recovered from the complement.
template <int NC>
std::array<double, NC> mass_fractions(const State<NC>& u) {
  using L = Layout<NC>;
  double rho = u[L::kRho];
  if (!(rho > 0.0)) throw DomainError("mmhd: non-positive density");
  std::array<double, NC> y{};
  double rest = rho;
  for (int k = 0; k < NC - 1; ++k) {
    y[k] = u[k] / rho;
    rest -= u[k];
  }
  y[NC - 1] = rest / rho;
  return y;
}

template <int NC>
double mixture_gamma(const std::array<double, NC>& y, const MixtureSpec<NC>& spec) {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < NC; ++k) {
    num += spec.gamma[k] * spec.cv[k] * y[k];
    den += spec.cv[k] * y[k];
  }
  if (den == 0.0) throw DomainError("mmhd: degenerate mixture");
  return num / den;
}

template <int NC>
double internal_energy(const State<NC>& u) {
  using L = Layout<NC>;
  double rho = u[L::kRho];
  if (!(rho > 0.0)) throw DomainError("mmhd: non-positive density");
  double m2 = 0.0, b2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    m2 += u[L::kMom + i] * u[L::kMom + i];
    b2 += u[L::kMag + i] * u[L::kMag + i];
  }
  return u[L::kEnergy] - 0.5 * m2 / rho - 0.5 * b2;
}

template <int NC>
double pressure(const State<NC>& u, const MixtureSpec<NC>& spec) {
  return (mixture_gamma<NC>(mass_fractions<NC>(u), spec) - 1.0) * internal_energy<NC>(u);
}

template <int NC>
State<NC> to_conserved(const Primitive<NC>& w, const MixtureSpec<NC>& spec) {
  using L = Layout<NC>;
  State<NC> u{};
  for (int k = 0; k < NC - 1; ++k) u[k] = w.rho * w.Y[k];
  u[L::kRho] = w.rho;
  double gam = mixture_gamma<NC>(w.Y, spec);
  for (int i = 0; i < 3; ++i) {
    u[L::kMom + i] = w.rho * w.v[i];
    u[L::kMag + i] = w.B[i];
  }
  u[L::kEnergy] = w.p / (gam - 1.0) + 0.5 * w.rho * norm2(w.v) + 0.5 * norm2(w.B);
  return u;
}

template <int NC>
Primitive<NC> to_primitive(const State<NC>& u, const MixtureSpec<NC>& spec) {
  using L = Layout<NC>;
  Primitive<NC> w;
  w.rho = u[L::kRho];
  w.Y = mass_fractions<NC>(u);
  for (int i = 0; i < 3; ++i) {
    w.v[i] = u[L::kMom + i] / w.rho;
    w.B[i] = u[L::kMag + i];
  }
  w.p = (mixture_gamma<NC>(w.Y, spec) - 1.0) * internal_energy<NC>(u);
  return w;
}

// Physical flux in direction dir (0 = x, 1 = y).
// Flux with the thermal pressure already known.
template <int NC>
State<NC> flux_with_pressure(const State<NC>& u, int dir, double p) {
  using L = Layout<NC>;
  double rho = u[L::kRho];
  if (!(rho > 0.0)) throw DomainError("mmhd: non-positive density");
  Vec3 v{u[L::kMom] / rho, u[L::kMom + 1] / rho, u[L::kMom + 2] / rho};
  Vec3 B{u[L::kMag], u[L::kMag + 1], u[L::kMag + 2]};
  double ptot = p + 0.5 * norm2(B);
  double vl = v[dir], bl = B[dir];
  State<NC> f{};
  for (int k = 0; k < NC - 1; ++k) f[k] = u[k] * vl;
  f[L::kRho] = u[L::kMom + dir];
  for (int i = 0; i < 3; ++i) {
    f[L::kMom + i] = u[L::kMom + i] * vl - B[i] * bl;
    f[L::kMag + i] = B[i] * vl - v[i] * bl;
  }
  f[L::kMom + dir] += ptot;
  f[L::kMag + dir] = 0.0;
  f[L::kEnergy] = vl * (u[L::kEnergy] + ptot) - bl * dot(v, B);
  return f;
}

template <int NC>
State<NC> flux(const State<NC>& u, int dir, const MixtureSpec<NC>& spec) {
  return flux_with_pressure<NC>(u, dir, pressure<NC>(u, spec));
}

// S(u) = (0, B, v, v . B)
template <int NC>
State<NC> godunov_source(const State<NC>& u) {
  using L = Layout<NC>;
  double rho = u[L::kRho];
  if (!(rho > 0.0)) throw DomainError("mmhd: non-positive density");
  State<NC> s{};
  double vb = 0.0;
  for (int i = 0; i < 3; ++i) {
    double v = u[L::kMom + i] / rho;
    s[L::kMom + i] = u[L::kMag + i];
    s[L::kMag + i] = v;
    vb += v * u[L::kMag + i];
  }
  s[L::kEnergy] = vb;
  return s;
}

template <int NC>
double fast_speed(const State<NC>& u, int dir, const MixtureSpec<NC>& spec) {
  using L = Layout<NC>;
  double rho = u[L::kRho];
  double gam = mixture_gamma<NC>(mass_fractions<NC>(u), spec);
  double p = (gam - 1.0) * internal_energy<NC>(u);
  if (!(p > 0.0)) throw DomainError("mmhd: non-positive pressure");
  double a2 = gam * p / rho;
  double b2 = 0.0;
  for (int i = 0; i < 3; ++i) b2 += u[L::kMag + i] * u[L::kMag + i];
  b2 /= rho;
  double bl2 = u[L::kMag + dir] * u[L::kMag + dir] / rho;
  double s = a2 + b2;
  double disc = std::max(0.0, s * s - 4.0 * a2 * bl2);
  return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

// Numerical viscosity bound for a pair of states.
template <int NC>
double wave_speed(const State<NC>& ul, const State<NC>& ur, int dir, const MixtureSpec<NC>& spec) {
  using L = Layout<NC>;
  double cl = fast_speed<NC>(ul, dir, spec);
  double cr = fast_speed<NC>(ur, dir, spec);
  double rl = ul[L::kRho], rr = ur[L::kRho];
  double vl = ul[L::kMom + dir] / rl, vr = ur[L::kMom + dir] / rr;
  double sl = std::sqrt(rl), sr = std::sqrt(rr);
  double db2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    double d = ul[L::kMag + i] - ur[L::kMag + i];
    db2 += d * d;
  }
  double avg = std::abs(sl * vl + sr * vr) / (sl + sr) + std::max(cl, cr);
  double a = std::max({std::abs(vl) + cl, std::abs(vr) + cr, avg});
  return a + std::sqrt(db2) / (sl + sr);
}

template <int NC>
State<NC> as_state(StateView u) {
  State<NC> s{};
  for (int i = 0; i < NC + 7; ++i) s[i] = u[i];
  return s;
}

// Direct region: every mass fraction in [0, 1], rho > 0, p > 0.
template <int NC>
InvariantRegion region(const MixtureSpec<NC>& spec) {
  using L = Layout<NC>;
  spec.validate();
  std::vector<Constraint> cs;
  cs.push_back({"density", [](StateView u) { return u[L::kRho]; }, Strictness::Strict});
  for (int k = 0; k < NC; ++k) {
    cs.push_back({"fraction_lower",
                  [k](StateView u) { return mass_fractions<NC>(as_state<NC>(u))[k]; },
                  Strictness::NonStrict});
    cs.push_back({"fraction_upper",
                  [k](StateView u) { return 1.0 - mass_fractions<NC>(as_state<NC>(u))[k]; },
                  Strictness::NonStrict});
  }
  cs.push_back({"pressure", [spec](StateView u) { return pressure<NC>(as_state<NC>(u), spec); },
                Strictness::Strict});
  return InvariantRegion(NC + 7, std::move(cs));
}

template <int NC>
double phi(StateView u, const double* vs, const double* bs) {
  return ideal_mhd::phi(u, vs, bs, Layout<NC>::kRho);
}

template <int NC>
GqlRepresentation gql() {
  using L = Layout<NC>;
  std::vector<LinearConstraint> cs;
  for (int k = 0; k < NC - 1; ++k)
    cs.push_back({"partial_density", [k](StateView u, ThetaView) { return u[k]; },
                  AuxDomain::none(), Strictness::NonStrict, {}, MinimizerRole::Exact});
  if (NC > 1)
    cs.push_back({"partial_density_last",
                  [](StateView u, ThetaView) {
                    double r = u[L::kRho];
                    for (int k = 0; k < NC - 1; ++k) r -= u[k];
                    return r;
                  },
                  AuxDomain::none(), Strictness::NonStrict, {}, MinimizerRole::Exact});
  cs.push_back({"density", [](StateView u, ThetaView) { return u[L::kRho]; }, AuxDomain::none(),
                Strictness::Strict, {}, MinimizerRole::Exact});
  cs.push_back(ideal_mhd::energy_constraint(L::kRho));
  return GqlRepresentation(NC + 7, std::move(cs));
}

// Admissibility by exact signs on conserved quantities, as used by solvers.
template <int NC>
bool admissible(const State<NC>& u) {
  using L = Layout<NC>;
  double rho = u[L::kRho];
  if (!(rho > 0.0)) return false;
  double rest = rho;
  for (int k = 0; k < NC - 1; ++k) {
    if (!(u[k] >= 0.0)) return false;
    rest -= u[k];
  }
  if (!(rest >= 0.0)) return false;
  return internal_energy<NC>(u) > 0.0;
}

}  // namespace gql::mmhd
