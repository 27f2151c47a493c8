#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "halton.hpp"

namespace gql {

using StateView = std::span<const double>;
using ThetaView = std::span<const double>;

enum class Strictness { Strict, NonStrict };

inline bool satisfies(double value, Strictness kind) {
  return kind == Strictness::Strict ? value > 0.0 : value >= 0.0;
}

struct Constraint {
  std::string name;
  std::function<double(StateView)> g;
  Strictness kind = Strictness::Strict;
};

// G = { u : g_i(u) > 0 (or >= 0) for all i }.
class InvariantRegion {
 public:
  InvariantRegion(std::size_t dim, std::vector<Constraint> constraints)
      : dim_(dim), constraints_(std::move(constraints)) {
    if (dim_ == 0) throw UsageError("InvariantRegion: dimension must be positive");
    for (const auto& c : constraints_)
      if (!c.g) throw UsageError("InvariantRegion: empty evaluator for " + c.name);
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  std::size_t dim_;
  std::vector<Constraint> constraints_;
};

inline void check_dim(std::size_t expected, std::size_t got, const char* who) {
  if (expected != got)
    throw UsageError(std::string(who) + ": state has dimension " + std::to_string(got) +
                     ", expected " + std::to_string(expected));
}

// Evaluators that throw DomainError count as violated.
inline bool contains_direct(const InvariantRegion& region, StateView u) {
  check_dim(region.dim(), u.size(), "contains_direct");
  for (const auto& c : region.constraints()) {
    double v;
    try {
      v = c.g(u);
    } catch (const DomainError&) {
      return false;
    }
    if (!satisfies(v, c.kind)) return false;
  }
  return true;
}

// Index of the first violated constraint, or -1.
inline int first_violation(const InvariantRegion& region, StateView u) {
  check_dim(region.dim(), u.size(), "first_violation");
  int i = 0;
  for (const auto& c : region.constraints()) {
    try {
      if (!satisfies(c.g(u), c.kind)) return i;
    } catch (const DomainError&) {
      return i;
    }
    ++i;
  }
  return -1;
}

using ScaleFn = std::function<double(StateView)>;

// Auxiliary-variable domain as a product of simple factors. Points are drawn
// in the open unit cube and mapped into the factor; unbounded factors use a
// state-dependent scale.
class AuxDomain {
 public:
  enum class Kind { RealLine, HalfLine, Interval, Sphere, Ball };

  struct Factor {
    Kind kind;
    std::size_t dim;
    double lo = 0.0;
    double hi = 0.0;
    ScaleFn scale;
  };

  AuxDomain() = default;

  static AuxDomain none() { return AuxDomain(); }

  static AuxDomain real_line(std::size_t n, ScaleFn scale) {
    AuxDomain d;
    for (std::size_t i = 0; i < n; ++i) d.factors_.push_back({Kind::RealLine, 1, 0, 0, scale});
    return d;
  }
  static AuxDomain half_line(ScaleFn scale) {
    AuxDomain d;
    d.factors_.push_back({Kind::HalfLine, 1, 0, 0, std::move(scale)});
    return d;
  }
  static AuxDomain interval(double lo, double hi) {
    if (!(lo < hi)) throw UsageError("AuxDomain::interval: empty interval");
    AuxDomain d;
    d.factors_.push_back({Kind::Interval, 1, lo, hi, {}});
    return d;
  }
  static AuxDomain sphere(std::size_t n) {
    if (n < 2) throw UsageError("AuxDomain::sphere: need n >= 2");
    AuxDomain d;
    d.factors_.push_back({Kind::Sphere, n, 0, 0, {}});
    return d;
  }
  static AuxDomain ball(std::size_t n) {
    if (n < 1) throw UsageError("AuxDomain::ball: need n >= 1");
    AuxDomain d;
    d.factors_.push_back({Kind::Ball, n, 0, 0, {}});
    return d;
  }

  friend AuxDomain operator*(AuxDomain a, const AuxDomain& b) {
    a.factors_.insert(a.factors_.end(), b.factors_.begin(), b.factors_.end());
    return a;
  }

  const std::vector<Factor>& factors() const { return factors_; }

  std::size_t dim() const {
    std::size_t n = 0;
    for (const auto& f : factors_) n += f.dim;
    return n;
  }

  std::size_t sample_dim() const {
    std::size_t n = 0;
    for (const auto& f : factors_) n += sample_dim(f);
    return n;
  }

  bool empty() const { return factors_.empty(); }

  // Map unit-cube coordinates t (length sample_dim) into theta (length dim).
  void map(const double* t, StateView u, double* theta) const {
    for (const auto& f : factors_) {
      switch (f.kind) {
        case Kind::RealLine:
          *theta++ = f.scale(u) * std::tan(std::numbers::pi * (*t++ - 0.5));
          break;
        case Kind::HalfLine:
          *theta++ = f.scale(u) * std::tan(0.5 * std::numbers::pi * *t++);
          break;
        case Kind::Interval: {
          double v = f.lo + (f.hi - f.lo) * *t++;
          *theta++ = std::clamp(v, std::nextafter(f.lo, f.hi), std::nextafter(f.hi, f.lo));
          break;
        }
        case Kind::Sphere:
        case Kind::Ball: {
          std::size_t pairs = (f.dim + 1) / 2;
          double g[32];
          for (std::size_t p = 0; p < pairs; ++p) {
            double r = std::sqrt(-2.0 * std::log(t[2 * p]));
            double a = 2.0 * std::numbers::pi * t[2 * p + 1];
            g[2 * p] = r * std::cos(a);
            g[2 * p + 1] = r * std::sin(a);
          }
          t += 2 * pairs;
          double nrm = 0.0;
          for (std::size_t i = 0; i < f.dim; ++i) nrm += g[i] * g[i];
          nrm = std::sqrt(nrm);
          if (nrm == 0.0) {
            g[0] = 1.0;
            nrm = 1.0;
          }
          double radius = 1.0;
          if (f.kind == Kind::Ball) radius = std::pow(*t++, 1.0 / static_cast<double>(f.dim));
          for (std::size_t i = 0; i < f.dim; ++i) *theta++ = radius * g[i] / nrm;
          break;
        }
      }
    }
  }

  bool contains(ThetaView theta) const {
    if (theta.size() != dim()) return false;
    std::size_t k = 0;
    for (const auto& f : factors_) {
      switch (f.kind) {
        case Kind::RealLine:
          if (!std::isfinite(theta[k])) return false;
          break;
        case Kind::HalfLine:
          if (!(theta[k] > 0.0) || !std::isfinite(theta[k])) return false;
          break;
        case Kind::Interval:
          if (!(theta[k] > f.lo && theta[k] < f.hi)) return false;
          break;
        case Kind::Sphere: {
          double s = 0.0;
          for (std::size_t i = 0; i < f.dim; ++i) s += theta[k + i] * theta[k + i];
          if (std::abs(s - 1.0) > 1e-12) return false;
          break;
        }
        case Kind::Ball: {
          double s = 0.0;
          for (std::size_t i = 0; i < f.dim; ++i) s += theta[k + i] * theta[k + i];
          if (!(s <= 1.0)) return false;
          break;
        }
      }
      k += f.dim;
    }
    return true;
  }

 private:
  static std::size_t sample_dim(const Factor& f) {
    switch (f.kind) {
      case Kind::Sphere: return 2 * ((f.dim + 1) / 2);
      case Kind::Ball: return 2 * ((f.dim + 1) / 2) + 1;
      default: return 1;
    }
  }

  std::vector<Factor> factors_;
};

// Exact minimizers certify membership; probes can only falsify.
enum class MinimizerRole { Exact, Probe };

struct LinearConstraint {
  std::string name;
  // phi(u; theta), affine in u for every theta.
  std::function<double(StateView, ThetaView)> phi;
  AuxDomain domain;
  Strictness kind = Strictness::Strict;
  std::function<std::vector<double>(StateView)> minimizer;
  MinimizerRole role = MinimizerRole::Exact;
};

class GqlRepresentation {
 public:
  GqlRepresentation(std::size_t dim, std::vector<LinearConstraint> constraints)
      : dim_(dim), constraints_(std::move(constraints)) {
    if (dim_ == 0) throw UsageError("GqlRepresentation: dimension must be positive");
    for (const auto& c : constraints_)
      if (!c.phi) throw UsageError("GqlRepresentation: empty functional for " + c.name);
    // Plain linear constraints are decisive and cheap, so they run first.
    std::stable_partition(constraints_.begin(), constraints_.end(),
                          [](const LinearConstraint& c) { return c.domain.empty(); });
  }

  std::size_t dim() const { return dim_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

 private:
  std::size_t dim_;
  std::vector<LinearConstraint> constraints_;
};

enum class Membership { In, Out, Undecided };

inline const char* to_string(Membership m) {
  switch (m) {
    case Membership::In: return "in";
    case Membership::Out: return "out";
    default: return "undecided";
  }
}

namespace detail {

inline std::vector<double> try_minimizer(const LinearConstraint& c, StateView u) {
  if (!c.minimizer) return {};
  try {
    auto th = c.minimizer(u);
    if (th.size() != c.domain.dim()) throw UsageError("minimizer returned wrong dimension");
    return th;
  } catch (const DomainError&) {
    return {};
  }
}

inline double safe_phi(const LinearConstraint& c, StateView u, ThetaView th) {
  try {
    double v = c.phi(u, th);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  } catch (const DomainError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace detail

inline Membership contains_gql(const GqlRepresentation& rep, StateView u, const AuxSample& sample) {
  check_dim(rep.dim(), u.size(), "contains_gql");
  bool undecided = false;
  std::vector<double> t, theta;
  for (const auto& c : rep.constraints()) {
    if (c.domain.empty()) {
      if (!satisfies(detail::safe_phi(c, u, {}), c.kind)) return Membership::Out;
      continue;
    }
    auto th = detail::try_minimizer(c, u);
    if (!th.empty()) {
      bool ok = satisfies(detail::safe_phi(c, u, th), c.kind);
      if (!ok) return Membership::Out;
      if (c.role == MinimizerRole::Exact) continue;
    }
    t.resize(c.domain.sample_dim());
    theta.resize(c.domain.dim());
    for (std::size_t k = 0; k < sample.size(); ++k) {
      sample.point(k, t.size(), t.data());
      c.domain.map(t.data(), u, theta.data());
      if (!satisfies(detail::safe_phi(c, u, theta), c.kind)) return Membership::Out;
    }
    undecided = true;
  }
  return undecided ? Membership::Undecided : Membership::In;
}

// Numerical estimate of min over theta of phi_i(u; theta), one entry per
// constraint: registered minimizer, Halton samples, then coordinate descent
// in the unit cube started from the best sample.
inline double polish_min(const LinearConstraint& c, StateView u, std::vector<double> t,
                         double fbest, std::size_t max_evals = 4000) {
  std::vector<double> theta(c.domain.dim());
  auto eval = [&](const std::vector<double>& tt) {
    c.domain.map(tt.data(), u, theta.data());
    return detail::safe_phi(c, u, theta);
  };
  constexpr double lo = 0x1.0p-52;
  constexpr double hi = 1.0 - 0x1.0p-53;
  double h = 0.05;
  std::size_t evals = 0;
  while (h > 1e-15 && evals < max_evals) {
    bool improved = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (double dir : {-1.0, 1.0}) {
        double old = t[i];
        t[i] = std::clamp(old + dir * h, lo, hi);
        double f = eval(t);
        ++evals;
        if (f < fbest) {
          fbest = f;
          improved = true;
          break;
        }
        t[i] = old;
      }
    }
    if (!improved) h *= 0.5;
  }
  return fbest;
}

inline std::vector<double> numeric_min_phi(const GqlRepresentation& rep, StateView u,
                                           std::size_t budget, std::uint64_t seed = 0) {
  check_dim(rep.dim(), u.size(), "numeric_min_phi");
  AuxSample sample(budget, seed);
  std::vector<double> out;
  out.reserve(rep.constraints().size());
  for (const auto& c : rep.constraints()) {
    if (c.domain.empty()) {
      out.push_back(detail::safe_phi(c, u, {}));
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    auto th = detail::try_minimizer(c, u);
    if (!th.empty()) best = detail::safe_phi(c, u, th);
    std::vector<double> t(c.domain.sample_dim()), theta(c.domain.dim()), tbest;
    double fsample = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sample.size(); ++k) {
      sample.point(k, t.size(), t.data());
      c.domain.map(t.data(), u, theta.data());
      double f = detail::safe_phi(c, u, theta);
      if (f < fsample) {
        fsample = f;
        tbest = t;
      }
    }
    if (!tbest.empty() && std::isfinite(fsample)) fsample = polish_min(c, u, tbest, fsample);
    out.push_back(std::min(best, fsample));
  }
  return out;
}

// Membership read off numeric minima: the decision used when no exact
// minimizer is available.
inline bool numeric_in(const GqlRepresentation& rep, StateView u, std::size_t budget,
                       std::uint64_t seed = 0) {
  auto mins = numeric_min_phi(rep, u, budget, seed);
  for (std::size_t i = 0; i < mins.size(); ++i)
    if (!satisfies(mins[i], rep.constraints()[i].kind)) return false;
  return true;
}

}  // namespace gql
