#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "dg/solver.hpp"
#include "flux.hpp"
#include "fv.hpp"
#include "gasdyn.hpp"
#include "io.hpp"
#include "mhd.hpp"
#include "moment.hpp"
#include "relativistic.hpp"

namespace gql::verify {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(g_); }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(g_); }
  Vec3 ball(double r) {
    Vec3 v{normal(), normal(), normal()};
    double n = norm(v);
    double s = r * std::cbrt(uniform(0.0, 1.0)) / (n > 0.0 ? n : 1.0);
    return {v[0] * s, v[1] * s, v[2] * s};
  }
  Vec3 box(double r) { return {uniform(-r, r), uniform(-r, r), uniform(-r, r)}; }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

using Vector = std::vector<double>;

template <std::size_t N>
Vector to_vec(const std::array<double, N>& a) {
  return Vector(a.begin(), a.end());
}

inline constexpr double kEntropyMin = 0.5;
inline constexpr double kEulerGamma = 1.4;
inline constexpr double kRelGamma = 5.0 / 3.0;

inline mmhd::MixtureSpec<2> audit_mixture() { return {{2.42, 0.72}, {5.0 / 3.0, 1.4}}; }

// Samplers draw primitives from bounded boxes; violators break one constraint.
struct SystemCase {
  std::string name;
  InvariantRegion region;
  GqlRepresentation rep;
  std::function<Vector(Rng&)> admissible;
  std::function<Vector(Rng&)> violator;
};

inline Vector euler_sample(Rng& r) {
  return to_vec(gasdyn::from_primitive(r.log_uniform(1e-2, 1e2), r.uniform(-10, 10),
                                       r.log_uniform(1e-2, 1e2), kEulerGamma));
}

inline Vector tm_sample(Rng& r, double lam_lo, double lam_hi) {
  double rho = r.log_uniform(1e-2, 1e2);
  double a = r.uniform(0.0, std::numbers::pi);
  double l1 = r.log_uniform(1e-2, 1e2);
  double l2 = lam_lo < 0.0 ? r.uniform(lam_lo, lam_hi) : r.log_uniform(lam_lo, lam_hi);
  double c = std::cos(a), s = std::sin(a);
  tenmoment::Sym2 p{l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
  return to_vec(tenmoment::from_primitive(rho, r.uniform(-5, 5), r.uniform(-5, 5), p));
}

inline Vector mhd_sample(Rng& r, double p) {
  double rho = r.log_uniform(1e-2, 1e2);
  Vec3 v = r.box(5.0), b = r.box(5.0);
  return {rho,  rho * v[0], rho * v[1], rho * v[2], b[0], b[1], b[2],
          p / (kEulerGamma - 1.0) + 0.5 * rho * norm2(v) + 0.5 * norm2(b)};
}

inline Vector mmhd_sample(Rng& r, double y1, double p, double rho_sign = 1.0) {
  auto spec = audit_mixture();
  mmhd::Primitive<2> w;
  w.rho = r.log_uniform(1e-2, 1e2);
  w.v = r.box(5.0);
  w.B = r.box(5.0);
  w.p = p;
  w.Y = {y1, 1.0 - y1};
  double yc = std::clamp(y1, 0.0, 1.0);
  double gam = mmhd::mixture_gamma<2>({yc, 1.0 - yc}, spec);
  mmhd::State<2> u{};
  u[0] = w.rho * y1;
  u[1] = w.rho;
  for (int i = 0; i < 3; ++i) {
    u[2 + i] = w.rho * w.v[i];
    u[5 + i] = w.B[i];
  }
  u[8] = p / (gam - 1.0) + 0.5 * w.rho * norm2(w.v) + 0.5 * norm2(w.B);
  if (rho_sign < 0.0) {
    u[0] = -u[0];
    u[1] = -u[1];
    u[8] = std::abs(u[8]) + 0.5 * w.rho * norm2(w.v) + 1.0;
  }
  return to_vec(u);
}

inline Vector rmhd_sample(Rng& r) {
  rmhd::Primitive w{r.log_uniform(0.1, 10.0), r.ball(0.99), r.ball(100.0), r.log_uniform(0.1, 10.0)};
  return to_vec(rmhd::to_conserved(w, kRelGamma));
}

inline std::vector<std::string> systems() {
  return {"euler", "entropy_euler", "m1", "rhd", "tenmoment", "ideal_mhd", "mmhd"};
}

inline SystemCase make_system(const std::string& name) {
  if (name == "euler")
    return {name, gasdyn::region(), gasdyn::gql(), euler_sample, [](Rng& r) {
              Vector u = euler_sample(r);
              if (r.pick(2) == 0) return Vector{-u[0], u[1], u[2]};
              double k = 0.5 * u[1] * u[1] / u[0];
              return Vector{u[0], u[1], k - r.log_uniform(1e-2, 1e2)};
            }};
  if (name == "entropy_euler") {
    auto sample = [](Rng& r, double lo, double hi) {
      double rho = r.log_uniform(1e-2, 1e2);
      double s = kEntropyMin * r.log_uniform(lo, hi);
      return to_vec(gasdyn::from_primitive(rho, r.uniform(-10, 10), s * std::pow(rho, kEulerGamma),
                                           kEulerGamma));
    };
    return {name, gasdyn::entropy_region(kEntropyMin, kEulerGamma),
            gasdyn::entropy_gql(kEntropyMin, kEulerGamma),
            [=](Rng& r) { return sample(r, 1.01, 100.0); },
            [=](Rng& r) {
              Vector u = sample(r, 1.01, 100.0);
              if (r.pick(2) == 0) return Vector{-u[0], u[1], u[2]};
              return sample(r, 0.05, 0.95);
            }};
  }
  if (name == "m1") {
    auto sample = [](Rng& r, double lo, double hi) {
      double e = r.log_uniform(0.1, 10.0);
      Vec3 d{r.normal(), r.normal(), r.normal()};
      double s = e * r.uniform(lo, hi) / norm(d);
      return Vector{e, d[0] * s, d[1] * s, d[2] * s};
    };
    return {name, m1::region(), m1::gql(), [=](Rng& r) { return sample(r, 0.0, 0.999); },
            [=](Rng& r) { return sample(r, 1.01, 3.0); }};
  }
  if (name == "rhd") {
    auto sample = [](Rng& r) {
      return to_vec(rhd::to_conserved(
          {r.log_uniform(1e-2, 1e2), r.uniform(-0.99, 0.99), r.log_uniform(1e-2, 1e2)}, kRelGamma));
    };
    return {name, rhd::region(), rhd::gql(), sample, [=](Rng& r) {
              Vector u = sample(r);
              if (r.pick(2) == 0) return Vector{-u[0], u[1], u[2]};
              double b = std::hypot(u[0], u[1]);
              return Vector{u[0], u[1], b * (1.0 - r.uniform(0.01, 0.5))};
            }};
  }
  if (name == "tenmoment")
    return {name, tenmoment::region(), tenmoment::gql(),
            [](Rng& r) { return tm_sample(r, 1e-2, 1e2); },
            [](Rng& r) {
              Vector u = tm_sample(r, 1e-2, 1e2);
              if (r.pick(2) == 0) {
                u[0] = -u[0];
                return u;
              }
              return tm_sample(r, -10.0, -0.01);
            }};
  if (name == "ideal_mhd")
    return {name, ideal_mhd::region(), ideal_mhd::gql(),
            [](Rng& r) { return mhd_sample(r, r.log_uniform(1e-2, 1e2)); },
            [](Rng& r) {
              Vector u = mhd_sample(r, r.log_uniform(1e-2, 1e2));
              if (r.pick(2) == 0) {
                u[0] = -u[0];
                return u;
              }
              return mhd_sample(r, -r.log_uniform(1e-2, 1e2));
            }};
  if (name == "mmhd") {
    return {name, mmhd::region<2>(audit_mixture()), mmhd::gql<2>(),
            [](Rng& r) { return mmhd_sample(r, r.uniform(0.0, 1.0), r.log_uniform(1e-2, 1e2)); },
            [](Rng& r) {
              double p = r.log_uniform(1e-2, 1e2);
              switch (r.pick(4)) {
                case 0: return mmhd_sample(r, r.uniform(0.0, 1.0), p, -1.0);
                case 1: return mmhd_sample(r, -r.uniform(0.01, 0.5), p);
                case 2: return mmhd_sample(r, 1.0 + r.uniform(0.01, 0.5), p);
                default: return mmhd_sample(r, r.uniform(0.0, 1.0), -p);
              }
            }};
  }
  if (name == "rmhd")
    return {name, rmhd::region(kRelGamma), rmhd::gql(), rmhd_sample, [](Rng& r) {
              Vector u = rmhd_sample(r);
              if (r.pick(2) == 0) {
                u[0] = -u[0];
                return u;
              }
              // Energy below the p = 0 boundary state with the same rho, v, B.
              rmhd::Primitive w{r.log_uniform(0.1, 10.0), r.ball(0.99), r.ball(100.0), 0.0};
              auto s = rmhd::to_conserved(w, kRelGamma);
              s[7] -= r.uniform(0.01, 0.5) * (s[7] - std::sqrt(s[0] * s[0] + s[1] * s[1] +
                                                                 s[2] * s[2] + s[3] * s[3]));
              return to_vec(s);
            }};
  throw UsageError("unknown system " + name);
}

inline double state_scale(const Vector& u) {
  double scale = 1.0;
  for (double x : u) scale = std::max(scale, std::abs(x));
  return scale;
}

// Smallest |g_i(u)| relative to the state magnitude; infinite when an
// evaluator rejects the state outright.
inline double margin(const InvariantRegion& region, const Vector& u) {
  double scale = state_scale(u);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : region.constraints()) {
    try {
      double v = c.g(u);
      if (std::isnan(v)) continue;
      m = std::min(m, std::abs(v) / scale);
    } catch (const DomainError&) {
    }
  }
  return m;
}

inline constexpr double kDegenerateMargin = 1e-8;
inline constexpr std::size_t kGqlSamples = 64;
inline constexpr std::size_t kNumericBudget = 2000;

// GQL verdict: analytic minimizers and samples first, numeric minimization
// when sampling cannot decide.
inline bool gql_verdict(const GqlRepresentation& rep, const Vector& u, std::uint64_t seed,
                        bool* escalated = nullptr) {
  Membership m = contains_gql(rep, u, AuxSample(kGqlSamples, seed));
  if (escalated) *escalated = m == Membership::Undecided;
  if (m == Membership::Undecided) return numeric_in(rep, u, kNumericBudget, seed);
  return m == Membership::In;
}

struct Disagreement {
  Vector u;
  bool direct = false;
  bool gql = false;
  double margin = 0.0;
};

struct EquivalenceReport {
  std::string system;
  long samples = 0;
  long agreements = 0;
  long undecided = 0;  // escalated to numeric minimization
  long degenerate = 0;
  long sampler_errors = 0;  // sampler produced a state on the wrong side
  std::vector<Disagreement> disagreements;
};

inline EquivalenceReport check_equivalence(const std::string& system, long n_admissible,
                                           long n_violators, std::uint64_t seed) {
  if (n_admissible < 0 || n_violators < 0 || n_admissible + n_violators < 1)
    throw UsageError("check_equivalence: need at least one sample");
  SystemCase sc = make_system(system);
  EquivalenceReport rep;
  rep.system = system;
  Rng rng(seed);
  for (long k = 0; k < n_admissible + n_violators; ++k) {
    bool want = k < n_admissible;
    Vector u = want ? sc.admissible(rng) : sc.violator(rng);
    ++rep.samples;
    bool direct = contains_direct(sc.region, u);
    if (direct != want) ++rep.sampler_errors;
    bool esc = false;
    bool verdict = gql_verdict(sc.rep, u, seed + 7919 * std::uint64_t(k + 1), &esc);
    if (esc) ++rep.undecided;
    if (verdict == direct) {
      ++rep.agreements;
      continue;
    }
    double mg = margin(sc.region, u);
    if (mg < kDegenerateMargin) {
      ++rep.degenerate;
      continue;
    }
    rep.disagreements.push_back({u, direct, verdict, mg});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Normals at boundary states: finite-difference gradient of g against the
// hand-coded normal and against the generalized cross product of tangents.

inline Vector fd_gradient(const std::function<double(const Vector&)>& g, const Vector& u,
                          double h_rel) {
  Vector grad(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double h = h_rel * (1.0 + std::abs(u[i]));
    Vector a = u, b = u;
    a[i] += h;
    b[i] -= h;
    grad[i] = (g(a) - g(b)) / (2.0 * h);
  }
  return grad;
}

// Vector orthogonal to the n-1 rows of `t` (each of length n).
inline Vector cross_product(const std::vector<Vector>& t) {
  const int n = int(t.size()) + 1;
  Vector out(n);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd m(n - 1, n - 1);
    for (int r = 0; r < n - 1; ++r)
      for (int c = 0, cc = 0; c < n; ++c)
        if (c != k) m(r, cc++) = t[r][c];
    out[k] = ((k % 2) ? -1.0 : 1.0) * m.determinant();
  }
  return out;
}

// Angle between lines (sign ignored) or between directions.
inline double angle(const Vector& a, const Vector& b, bool as_lines) {
  double na = 0.0, nb = 0.0, d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
    d += a[i] * b[i];
  }
  na = std::sqrt(na), nb = std::sqrt(nb);
  double s = (as_lines && d < 0.0) ? -1.0 : 1.0;
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double x = a[i] / na, y = s * b[i] / nb;
    diff += (x - y) * (x - y);
    sum += (x + y) * (x + y);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

struct NormalCase {
  std::string name;
  int params;
  std::function<Vector(Rng&)> sample_params;
  std::function<Vector(const Vector&)> boundary;  // params -> boundary state
  std::function<Vector(const Vector&)> normal;    // params -> hand-coded normal
  std::function<double(const Vector&)> g;
};

inline std::vector<std::string> normal_systems() {
  return {"euler", "entropy_euler", "ideal_mhd", "rhd_entropy"};
}

inline NormalCase make_normal_case(const std::string& name) {
  const double gam = kEulerGamma, rg = kRelGamma, smin = kEntropyMin;
  if (name == "euler")
    return {name, 2, [](Rng& r) { return Vector{r.log_uniform(0.1, 10), r.uniform(-3, 3)}; },
            [](const Vector& p) { return Vector{p[0], p[0] * p[1], 0.5 * p[0] * p[1] * p[1]}; },
            [](const Vector& p) { return Vector{0.5 * p[1] * p[1], -p[1], 1.0}; },
            [](const Vector& u) { return gasdyn::internal_energy({u[0], u[1], u[2]}); }};
  if (name == "entropy_euler")
    return {name, 2, [](Rng& r) { return Vector{r.log_uniform(0.1, 10), r.uniform(-3, 3)}; },
            [=](const Vector& p) { return to_vec(gasdyn::entropy_boundary_state(p[0], p[1], smin, gam)); },
            [=](const Vector& p) { return to_vec(gasdyn::entropy_normal(p[0], p[1], smin, gam)); },
            [=](const Vector& u) {
              return (gam - 1.0) * gasdyn::internal_energy({u[0], u[1], u[2]}) -
                     smin * std::pow(u[0], gam);
            }};
  if (name == "ideal_mhd")
    return {name, 7,
            [](Rng& r) {
              Vector p{r.log_uniform(0.1, 10)};
              for (int i = 0; i < 6; ++i) p.push_back(r.uniform(-3, 3));
              return p;
            },
            [](const Vector& p) {
              return to_vec(ideal_mhd::boundary_state(p[0], {p[1], p[2], p[3]}, {p[4], p[5], p[6]}));
            },
            [](const Vector& p) {
              return to_vec(ideal_mhd::normal({p[1], p[2], p[3]}, {p[4], p[5], p[6]}));
            },
            [](const Vector& u) { return ideal_mhd::g(u); }};
  if (name == "rhd_entropy")
    return {name, 2, [](Rng& r) { return Vector{r.log_uniform(0.1, 10), r.uniform(-0.9, 0.9)}; },
            [=](const Vector& p) { return to_vec(rhd::entropy_boundary_state(p[0], p[1], smin, rg)); },
            [=](const Vector& p) { return to_vec(rhd::entropy_normal(p[0], p[1], smin, rg)); },
            [=](const Vector& u) { return rhd::specific_entropy({u[0], u[1], u[2]}, rg) - smin; }};
  throw UsageError("unknown boundary parameterization " + name);
}

struct NormalReport {
  std::string system;
  long samples = 0;
  double max_angle_hand = 0.0;   // gradient vs hand-coded normal, as directions
  double max_angle_cross = 0.0;  // gradient vs cross product, as lines
};

inline NormalReport check_gradient_normals(const std::string& system, long n,
                                           std::uint64_t seed = 1, double h_rel = 1e-6) {
  if (n < 1) throw UsageError("check_gradient_normals: need n >= 1");
  NormalCase nc = make_normal_case(system);
  NormalReport rep;
  rep.system = system;
  Rng rng(seed);
  for (long k = 0; k < n; ++k) {
    Vector p = nc.sample_params(rng);
    Vector u = nc.boundary(p);
    Vector grad = fd_gradient(nc.g, u, h_rel);
    std::vector<Vector> tangents;
    for (int i = 0; i < nc.params; ++i) {
      double h = h_rel * (1.0 + std::abs(p[i]));
      Vector a = p, b = p;
      a[i] += h;
      b[i] -= h;
      Vector ua = nc.boundary(a), ub = nc.boundary(b), t(u.size());
      for (std::size_t c = 0; c < u.size(); ++c) t[c] = (ua[c] - ub[c]) / (2.0 * h);
      tangents.push_back(t);
    }
    rep.max_angle_hand = std::max(rep.max_angle_hand, angle(grad, nc.normal(p), false));
    rep.max_angle_cross = std::max(rep.max_angle_cross, angle(grad, cross_product(tangents), true));
    ++rep.samples;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Algebraic identities behind the analytic minimizers. Each tuple gives a
// residual relative to the magnitude of the terms on both sides.

struct IdentityReport {
  std::string identity;
  long tuples = 0;
  double max_residual = 0.0;
};

inline std::vector<std::string> identities() {
  return {"euler_completion", "tenmoment_completion", "ideal_mhd_completion", "rmhd_probe",
          "source"};
}

inline IdentityReport check_identity(const std::string& which, long n, std::uint64_t seed = 1) {
  if (n < 1) throw UsageError("check_identity: need n >= 1");
  IdentityReport rep;
  rep.identity = which;
  Rng r(seed);
  auto record = [&](double lhs, double rhs, double scale) {
    ++rep.tuples;
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs) / std::max(scale, 1.0));
  };
  for (long k = 0; k < n; ++k) {
    if (which == "euler_completion") {
      Vector u = euler_sample(r);
      double vs = u[1] / u[0] + 5.0 * r.normal();
      double g = gasdyn::internal_energy({u[0], u[1], u[2]});
      double d = vs - u[1] / u[0];
      double sq = 0.5 * u[0] * d * d;
      record(gasdyn::energy_phi(u, vs), sq + g,
             std::abs(u[2]) + std::abs(u[1] * vs) + 0.5 * u[0] * vs * vs + sq);
    } else if (which == "tenmoment_completion") {
      Vector u = tm_sample(r, 1e-2, 1e2);
      double a = r.uniform(0.0, 2.0 * std::numbers::pi);
      double z1 = std::cos(a), z2 = std::sin(a);
      double w1 = u[1] / u[0] + 3.0 * r.normal(), w2 = u[2] / u[0] + 3.0 * r.normal();
      auto red = tenmoment::reduced_energy(tenmoment::as_state(u));
      double zrz = z1 * z1 * red.a11 + 2.0 * z1 * z2 * red.a12 + z2 * z2 * red.a22;
      double d = z1 * (u[1] / u[0] - w1) + z2 * (u[2] / u[0] - w2);
      double sq = 0.5 * u[0] * d * d;
      double zw = z1 * w1 + z2 * w2;
      double scale = std::abs(u[3]) + 2.0 * std::abs(u[4]) + std::abs(u[5]) +
                     (std::abs(u[1]) + std::abs(u[2])) * std::abs(zw) + 0.5 * u[0] * zw * zw + sq;
      record(tenmoment::phi(u, z1, z2, w1, w2), zrz + sq, scale);
    } else if (which == "ideal_mhd_completion") {
      Vector u = mhd_sample(r, r.log_uniform(1e-3, 1e3));
      double vs[3], bs[3], sq = 0.0, lin = std::abs(u[7]), quad = 0.0;
      for (int i = 0; i < 3; ++i) {
        vs[i] = u[1 + i] / u[0] + 3.0 * r.normal();
        bs[i] = u[4 + i] + 3.0 * r.normal();
        double dv = u[1 + i] / u[0] - vs[i], db = u[4 + i] - bs[i];
        sq += 0.5 * u[0] * dv * dv + 0.5 * db * db;
        lin += std::abs(u[1 + i] * vs[i]) + std::abs(u[4 + i] * bs[i]);
        quad += 0.5 * u[0] * vs[i] * vs[i] + 0.5 * bs[i] * bs[i];
      }
      record(ideal_mhd::phi(u, vs, bs), ideal_mhd::g(u) + sq, lin + quad + sq);
    } else if (which == "rmhd_probe") {
      Vector u = rmhd_sample(r);
      const auto& c = rmhd::gql().constraints()[1];
      auto th = c.minimizer(u);
      double s = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
      record(c.phi(u, th), rmhd::g2(rmhd::as_state(u)), std::abs(u[7]) + s);
    } else if (which == "source") {
      using L = mmhd::Layout<2>;
      Vector v = mmhd_sample(r, r.uniform(0.0, 1.0), r.log_uniform(1e-3, 1e3));
      mmhd::State<2> u;
      std::copy(v.begin(), v.end(), u.begin());
      double b = r.normal();
      auto src = mmhd::godunov_source<2>(u);
      double vs[3], bs[3], vsbs = 0.0, sn = src[L::kEnergy], rhs = 0.0, scale = 0.0;
      for (int i = 0; i < 3; ++i) {
        vs[i] = u[L::kMom + i] / u[L::kRho] + 3.0 * r.normal();
        bs[i] = u[L::kMag + i] + 3.0 * r.normal();
        vsbs += vs[i] * bs[i];
        sn -= src[L::kMom + i] * vs[i] + src[L::kMag + i] * bs[i];
        rhs += (u[L::kMom + i] / u[L::kRho] - vs[i]) * (u[L::kMag + i] - bs[i]);
        scale += std::abs(src[L::kMom + i] * vs[i]) + std::abs(src[L::kMag + i] * bs[i]) +
                 std::abs(vs[i] * bs[i]);
      }
      sn += 0.5 * (vs[0] * vs[0] + vs[1] * vs[1] + vs[2] * vs[2]) * src[L::kRho];
      record(b * (vsbs + sn), b * rhs, std::abs(b) * (scale + std::abs(src[L::kEnergy])));
    } else {
      throw UsageError("unknown identity " + which);
    }
  }
  return rep;
}

// Conserved-to-primitive round trips over the stated sampling boxes.
struct RecoveryReport {
  std::string system;
  long states = 0;
  double max_rel_p = 0.0;
};

inline RecoveryReport check_recovery(const std::string& which, long n, std::uint64_t seed = 1) {
  if (n < 1) throw UsageError("check_recovery: need n >= 1");
  RecoveryReport rep;
  rep.system = which;
  Rng r(seed);
  for (long k = 0; k < n; ++k) {
    double p, rec;
    if (which == "rhd") {
      rhd::Primitive w{r.log_uniform(1e-3, 1e3), r.uniform(-0.999, 0.999), r.log_uniform(1e-3, 1e3)};
      p = w.p;
      rec = rhd::to_primitive(rhd::to_conserved(w, kRelGamma), kRelGamma).p;
    } else if (which == "rmhd") {
      rmhd::Primitive w{r.log_uniform(0.1, 10.0), r.ball(0.99), r.ball(100.0), r.log_uniform(0.1, 10.0)};
      p = w.p;
      rec = rmhd::to_primitive(rmhd::to_conserved(w, kRelGamma), kRelGamma).p;
    } else {
      throw UsageError("unknown recovery system " + which);
    }
    ++rep.states;
    rep.max_rel_p = std::max(rep.max_rel_p, std::abs(rec - p) / p);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Inequality audits behind the bound-preservation results. Each probe yields
// a margin (rhs - lhs for "lhs < rhs") normalized by the magnitude of the
// terms involved.

inline constexpr double kDegenerateAudit = 1e-14;

struct AuditReport {
  std::string audit;
  long trials = 0;
  long failures = 0;
  long degenerate = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<std::string> witnesses;

  // strict: margin must be > 0; otherwise >= 0.
  void record(double m, double scale, bool strict, const std::string& witness) {
    ++trials;
    double rel = m / (scale > 0.0 ? scale : 1.0);
    min_margin = std::min(min_margin, rel);
    bool ok = strict ? m > 0.0 : m >= 0.0;
    if (ok) return;
    if (std::abs(rel) < kDegenerateAudit) {
      ++degenerate;
      return;
    }
    ++failures;
    if (witnesses.size() < 10) witnesses.push_back(witness);
  }
};

inline std::vector<std::string> audits() {
  return {"LF-5.1", "GK-5.2-splitting", "NS-5.2", "TM-5.3", "MMHD-6.1", "MMHD-6.2"};
}

inline gasdyn::State euler_moderate(Rng& r) {
  return gasdyn::from_primitive(r.uniform(0.1, 10.0), r.uniform(-3.0, 3.0), r.uniform(0.1, 10.0),
                                kEulerGamma);
}

inline std::string dump(const Vector& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << io::num(v[i]);
  return os.str();
}

inline double dot3(const gasdyn::State& a, const gasdyn::State& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline gasdyn::State euler_normal(double vs) { return {0.5 * vs * vs, -vs, 1.0}; }

inline void audit_lf(AuditReport& rep, long trials, Rng& r) {
  for (long k = 0; k < trials; ++k) {
    auto u = euler_moderate(r);
    double a = gasdyn::wave_speed(u, kEulerGamma);
    auto f = gasdyn::flux(u, kEulerGamma);
    double vs = u[1] / u[0] + 2.0 * r.normal();
    for (const auto& n : {gasdyn::State{1, 0, 0}, euler_normal(vs)}) {
      double un = dot3(u, n), fn = dot3(f, n);
      rep.record(a * un - std::abs(fn), a * std::abs(un) + std::abs(fn), true,
                 "u=" + dump(to_vec(u)) + " v*=" + io::num(vs));
    }
  }
}

inline void audit_gk(AuditReport& rep, long trials, Rng& r) {
  for (long k = 0; k < trials; ++k) {
    auto u = euler_moderate(r);
    double vs = u[1] / u[0] + 2.0 * r.normal();
    auto fp = kinetic::half_flux(u, kinetic::Side::Plus, kEulerGamma);
    auto fm = kinetic::half_flux(u, kinetic::Side::Minus, kEulerGamma);
    for (const auto& n : {gasdyn::State{1, 0, 0}, euler_normal(vs)}) {
      double a = dot3(fp, n), b = -dot3(fm, n);
      double scale = std::abs(a) + std::abs(b) + std::abs(dot3(u, n));
      std::string w = "u=" + dump(to_vec(u)) + " v*=" + io::num(vs);
      rep.record(a, scale, true, w + " side=+");
      rep.record(b, scale, true, w + " side=-");
    }
  }
}

inline void audit_ns(AuditReport& rep, long trials, Rng& r) {
  for (long k = 0; k < trials; ++k) {
    auto u = euler_moderate(r);
    gasdyn::NsParams prm{r.log_uniform(0.1, 10.0), 100.0, r.log_uniform(0.1, 10.0), kEulerGamma};
    double vs = u[1] / u[0] + 2.0 * r.normal();
    auto n = euler_normal(vs);
    double rn = dot3(gasdyn::viscous_vector(u, prm), n);
    double un = dot3(u, n);
    double c = std::max(1.0, prm.gamma / (prm.prandtl * prm.eta));
    double half = 0.5 * vs * vs;
    double upper = c * un / u[0] - half;
    std::string w = "u=" + dump(to_vec(u)) + " v*=" + io::num(vs) + " eta=" + io::num(prm.eta) +
                    " Pr=" + io::num(prm.prandtl);
    double scale = std::abs(rn) + half + std::abs(upper);
    rep.record(rn + half, scale, true, w + " lower");
    rep.record(upper - rn, scale, false, w + " upper");
  }
}

inline void audit_tm(AuditReport& rep, long trials, Rng& r) {
  for (long k = 0; k < trials; ++k) {
    auto uv = tm_sample(r, 1e-2, 1e2);
    tenmoment::State u = tenmoment::as_state(uv);
    double a = r.uniform(0.0, 2.0 * std::numbers::pi);
    double z1 = std::cos(a), z2 = std::sin(a);
    double w1 = u[1] / u[0] + 2.0 * r.normal(), w2 = u[2] / u[0] + 2.0 * r.normal();
    double pu = tenmoment::phi(uv, z1, z2, w1, w2);
    for (int dir = 0; dir < 2; ++dir) {
      auto f = tenmoment::flux(u, dir);
      double pf = tenmoment::phi(to_vec(f), z1, z2, w1, w2);
      double al = tenmoment::wave_speed(u, dir);
      std::string w = "u=" + dump(uv) + " z=(" + io::num(z1) + "," + io::num(z2) + ") v*=(" +
                      io::num(w1) + "," + io::num(w2) + ") dir=" + std::to_string(dir);
      double scale = al * std::abs(pu) + std::abs(pf);
      rep.record(al * pu - pf, scale, false, w + " +");
      rep.record(al * pu + pf, scale, false, w + " -");
    }
  }
}

// Random admissible cell-average field with nonzero central divergence.
template <int NC>
std::vector<mmhd::State<NC>> random_mmhd_field(Rng& r, const mmhd::MixtureSpec<NC>& spec,
                                               std::size_t cells) {
  std::vector<mmhd::State<NC>> f(cells);
  for (auto& u : f) {
    mmhd::Primitive<NC> w;
    w.rho = r.log_uniform(0.2, 5.0);
    w.v = r.box(1.0);
    w.B = r.box(2.0);
    w.p = r.log_uniform(0.2, 5.0);
    double rest = 1.0;
    for (int k = 0; k < NC - 1; ++k) {
      w.Y[k] = rest * r.uniform(0.0, 1.0);
      rest -= w.Y[k];
    }
    w.Y[NC - 1] = rest;
    u = mmhd::to_conserved<NC>(w, spec);
  }
  return f;
}

inline Grid2d<mmhd::State<2>> periodic_grid(int nx, int ny, double dx, double dy) {
  Grid2d<mmhd::State<2>> g;
  g.nx = nx, g.ny = ny, g.dx = dx, g.dy = dy;
  return g;
}

inline double phi_scale(const mmhd::State<2>& w, const double* vs, const double* bs) {
  double s = std::abs(w[8]) + 1.0;
  for (int i = 0; i < 3; ++i)
    s += std::abs(w[2 + i] * vs[i]) + std::abs(w[5 + i] * bs[i]) + w[1] * vs[i] * vs[i] +
         bs[i] * bs[i];
  return s;
}

inline void audit_mmhd_first_order(AuditReport& rep, long fields, Rng& r, int probes = 100) {
  auto spec = audit_mixture();
  auto g = periodic_grid(20, 20, 0.05, 0.05);
  for (long k = 0; k < fields; ++k) {
    auto f = random_mmhd_field<2>(r, spec, g.cells());
    fv::MmhdFirstOrderOptions opt;
    opt.probes = 0;
    auto [out, step] = fv::step_mmhd_first_order<2>(f, g, spec, opt);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto& w = out[g.index(i, j)];
        double div = fv::central_divergence<2>(f, g, i, j);
        for (int q = 0; q < probes; ++q) {
          double vs[3], bs[3];
          fv::audit_probe<2>(w, r.engine(), q, vs, bs);
          double lhs = mmhd::phi<2>(StateView(w.data(), w.size()), vs, bs);
          double rhs = -step.dt * (vs[0] * bs[0] + vs[1] * bs[1] + vs[2] * bs[2]) * div;
          std::ostringstream os;
          os << "field " << k << " cell (" << i << "," << j << ") v*=(" << vs[0] << "," << vs[1]
             << "," << vs[2] << ") B*=(" << bs[0] << "," << bs[1] << "," << bs[2] << ")";
          rep.record(lhs - rhs, phi_scale(w, vs, bs) + std::abs(rhs), true, os.str());
        }
      }
  }
}

// Random DG field: admissible means, random higher modes, then the
// positivity limiter so the point-set hypothesis holds.
template <int NC>
std::vector<dg::Cell<NC>> random_dg_field(Rng& r, const dg::MmhdDg<NC>& s, double perturb) {
  using L = mmhd::Layout<NC>;
  auto means = random_mmhd_field<NC>(r, s.spec(), s.grid().cells());
  std::vector<dg::Cell<NC>> f(means.size());
  for (std::size_t c = 0; c < f.size(); ++c) {
    auto& cell = f[c];
    const auto& u = means[c];
    for (int v = 0; v < L::kVars; ++v) {
      if (!dg::Cell<NC>::is_scalar(v)) continue;
      cell.c[v][0] = u[v];
      for (int m = 1; m < dg::kModes; ++m) cell.c[v][m] = perturb * (std::abs(u[v]) + 0.1) * r.normal();
    }
    cell.d[0] = u[L::kMag];
    cell.d[1] = u[L::kMag + 1];
    double bs = 1.0 + std::hypot(u[L::kMag], u[L::kMag + 1]);
    for (int k = 2; k < dg::kMagModes; ++k) cell.d[k] = perturb * bs * r.normal();
    limiter::scale_limit<NC>(cell, s.tables().limiter);
  }
  return f;
}

inline void audit_mmhd_high_order(AuditReport& rep, long fields, Rng& r, int probes = 100) {
  auto spec = audit_mixture();
  auto g = periodic_grid(10, 10, 0.1, 0.1);
  dg::DgOptions opt;
  opt.source_term = false;
  dg::MmhdDg<2> s(g, spec, opt);
  for (long k = 0; k < fields; ++k) {
    auto f = random_dg_field<2>(r, s, 0.3);
    auto tr = s.traces(f);
    auto info = s.analyze(tr);
    double dt = 0.99 * dg::kOmegaHat1 / (info.alpha1 / g.dx + info.alpha2 / g.dy);
    auto avg = s.step_cell_averages(f, dt);
    auto div = s.divergence(f);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto& w = avg[g.index(i, j)];
        double d = div[g.index(i, j)].mean;
        for (int q = 0; q < probes; ++q) {
          double vs[3], bs[3];
          fv::audit_probe<2>(w, r.engine(), q, vs, bs);
          double lhs = mmhd::phi<2>(StateView(w.data(), w.size()), vs, bs);
          double rhs = -dt * (vs[0] * bs[0] + vs[1] * bs[1] + vs[2] * bs[2]) * d;
          std::ostringstream os;
          os << "field " << k << " cell (" << i << "," << j << ") v*=(" << vs[0] << "," << vs[1]
             << "," << vs[2] << ") B*=(" << bs[0] << "," << bs[1] << "," << bs[2] << ")";
          rep.record(lhs - rhs, phi_scale(w, vs, bs) + std::abs(rhs), true, os.str());
        }
      }
  }
}

// `trials` counts probes for pointwise audits and random fields for the
// MMHD scheme audits.
inline AuditReport audit_theorem_inequalities(const std::string& which, long trials,
                                              std::uint64_t seed) {
  if (trials < 1) throw UsageError("audit: trials must be at least 1");
  AuditReport rep;
  rep.audit = which;
  Rng r(seed);
  if (which == "LF-5.1") audit_lf(rep, trials, r);
  else if (which == "GK-5.2-splitting") audit_gk(rep, trials, r);
  else if (which == "NS-5.2") audit_ns(rep, trials, r);
  else if (which == "TM-5.3") audit_tm(rep, trials, r);
  else if (which == "MMHD-6.1") audit_mmhd_first_order(rep, trials, r);
  else if (which == "MMHD-6.2") audit_mmhd_high_order(rep, trials, r);
  else throw UsageError("unknown audit " + which);
  return rep;
}

inline void write_audit_csv(const std::string& path, const std::vector<AuditReport>& reps) {
  auto out = io::open_out(path);
  out << "audit,trials,failures,min_margin\n";
  for (const auto& r : reps)
    out << r.audit << ',' << r.trials << ',' << r.failures << ',' << io::num(r.min_margin) << '\n';
}

}  // namespace gql::verify
