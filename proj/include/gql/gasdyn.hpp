#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "core.hpp"
#include "vec.hpp"

// One-dimensional Euler and Navier-Stokes gas dynamics, state (rho, m, E).
namespace gql::gasdyn {

using State = std::array<double, 3>;

inline void check_gamma(double gamma) {
  if (!(gamma > 1.0)) throw UsageError("adiabatic index must exceed 1");
}

inline double internal_energy(const State& u) {
  if (!(u[0] > 0.0)) throw DomainError("euler: non-positive density");
  return u[2] - 0.5 * u[1] * u[1] / u[0];
}

inline double pressure(const State& u, double gamma = 1.4) {
  return (gamma - 1.0) * internal_energy(u);
}

inline State from_primitive(double rho, double v, double p, double gamma = 1.4) {
  return {rho, rho * v, 0.5 * rho * v * v + p / (gamma - 1.0)};
}

inline State flux(const State& u, double gamma = 1.4) {
  double p = pressure(u, gamma);
  double v = u[1] / u[0];
  return {u[1], u[1] * v + p, v * (u[2] + p)};
}

// alpha(u) = |v| + sqrt(gamma p / rho); only defined on the admissible set.
inline double wave_speed(const State& u, double gamma = 1.4) {
  double p = pressure(u, gamma);
  if (!(p > 0.0)) throw DomainError("euler: non-positive pressure");
  return std::abs(u[1] / u[0]) + std::sqrt(gamma * p / u[0]);
}

inline double specific_entropy(const State& u, double gamma = 1.4) {
  return pressure(u, gamma) / std::pow(u[0], gamma);
}

inline State as_state(StateView u) { return {u[0], u[1], u[2]}; }

inline InvariantRegion region() {
  return InvariantRegion(
      3, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
          {"internal_energy", [](StateView u) { return internal_energy(as_state(u)); },
           Strictness::Strict}});
}

// phi(u; v*) = E - m v* + rho v*^2 / 2, minimized at v* = m / rho.
inline double energy_phi(StateView u, double vs) {
  return u[2] - u[1] * vs + 0.5 * u[0] * vs * vs;
}

inline ScaleFn velocity_scale() {
  return [](StateView u) {
    double r = std::abs(u[0]);
    return 1.0 + (r > 0.0 ? std::abs(u[1]) / r : std::abs(u[1]));
  };
}

inline GqlRepresentation gql() {
  LinearConstraint dens{"density", [](StateView u, ThetaView) { return u[0]; },
                        AuxDomain::none(), Strictness::Strict, {}, MinimizerRole::Exact};
  LinearConstraint energy{"internal_energy",
                          [](StateView u, ThetaView th) { return energy_phi(u, th[0]); },
                          AuxDomain::real_line(1, velocity_scale()), Strictness::Strict,
                          [](StateView u) -> std::vector<double> {
                            if (!(u[0] > 0.0)) throw DomainError("density");
                            return {u[1] / u[0]};
                          },
                          MinimizerRole::Exact};
  return GqlRepresentation(3, {dens, energy});
}

// Entropy-bounded region: rho > 0 and S(u) >= S_min.
inline InvariantRegion entropy_region(double s_min, double gamma = 1.4) {
  check_gamma(gamma);
  if (!(s_min > 0.0)) throw UsageError("entropy bound must be positive");
  return InvariantRegion(
      3, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
          {"entropy",
           [s_min, gamma](StateView u) {
             State s = as_state(u);
             double e = internal_energy(s);
             return (gamma - 1.0) * e - s_min * std::pow(s[0], gamma);
           },
           Strictness::NonStrict}});
}

// n*(rho*, v*) = (v*^2/2 - S_min Gamma rho*^(Gamma-1)/(Gamma-1), -v*, 1)
inline State entropy_normal(double rho_s, double v_s, double s_min, double gamma) {
  return {0.5 * v_s * v_s - s_min * gamma * std::pow(rho_s, gamma - 1.0) / (gamma - 1.0), -v_s,
          1.0};
}

inline double entropy_phi(StateView u, double rho_s, double v_s, double s_min, double gamma) {
  State n = entropy_normal(rho_s, v_s, s_min, gamma);
  return u[0] * n[0] + u[1] * n[1] + u[2] * n[2] + s_min * std::pow(rho_s, gamma);
}

// Boundary of the entropy region: S(u*) = S_min.
inline State entropy_boundary_state(double rho_s, double v_s, double s_min, double gamma) {
  return from_primitive(rho_s, v_s, s_min * std::pow(rho_s, gamma), gamma);
}

// Registered without a minimizer: sampled membership can only falsify.
inline GqlRepresentation entropy_gql(double s_min, double gamma = 1.4) {
  check_gamma(gamma);
  if (!(s_min > 0.0)) throw UsageError("entropy bound must be positive");
  LinearConstraint dens{"density", [](StateView u, ThetaView) { return u[0]; },
                        AuxDomain::none(), Strictness::Strict, {}, MinimizerRole::Exact};
  ScaleFn rho_scale = [](StateView u) { return std::max(std::abs(u[0]), 1e-300); };
  LinearConstraint ent{
      "entropy",
      [s_min, gamma](StateView u, ThetaView th) {
        return entropy_phi(u, th[0], th[1], s_min, gamma);
      },
      AuxDomain::half_line(rho_scale) * AuxDomain::real_line(1, velocity_scale()),
      Strictness::NonStrict,
      {},
      MinimizerRole::Exact};
  return GqlRepresentation(3, {dens, ent});
}

// Analytic minimizer of the entropy functional, (rho, m / rho); exposed for
// checks only, not registered.
inline std::vector<double> entropy_minimizer(StateView u) {
  if (!(u[0] > 0.0)) throw DomainError("density");
  return {u[0], u[1] / u[0]};
}

struct NsParams {
  double eta = 1.0;
  double reynolds = 1.0;
  double prandtl = 0.72;
  double gamma = 1.4;

  void validate() const {
    check_gamma(gamma);
    if (!(eta > 0.0) || !(reynolds > 0.0) || !(prandtl > 0.0))
      throw UsageError("navier-stokes parameters must be positive");
  }
};

// r(u) = (0, v, v^2/2 + Gamma e / (Pr eta)), e = p / ((Gamma-1) rho).
inline State viscous_vector(const State& u, const NsParams& prm) {
  prm.validate();
  double v = u[1] / u[0];
  if (!(u[0] > 0.0)) throw DomainError("navier-stokes: non-positive density");
  double e = internal_energy(u) / u[0];
  return {0.0, v, 0.5 * v * v + prm.gamma * e / (prm.prandtl * prm.eta)};
}

// Coefficient multiplying dt / dx^2 in the diffusive part of the time step
// restriction.
inline double diffusion_number(const State& u, const NsParams& prm) {
  return 2.0 / (u[0] * prm.reynolds) * std::max(prm.eta, prm.gamma / prm.prandtl);
}

}  // namespace gql::gasdyn
