#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "errors.hpp"
#include "gasdyn.hpp"

namespace gql {

// glibc's erfc is correctly rounded to within an ulp or two over the real
// line, which is well inside what the kinetic flux needs.
inline double erfc(double x) { return std::erfc(x); }

// Lax-Friedrichs flux with a caller-supplied viscosity alpha.
template <std::size_t N, class FluxFn>
std::array<double, N> lf_flux(const std::array<double, N>& ul, const std::array<double, N>& ur,
                              FluxFn&& flux_fn, double alpha) {
  std::array<double, N> fl = flux_fn(ul);
  std::array<double, N> fr = flux_fn(ur);
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = 0.5 * (fl[i] + fr[i] - alpha * (ur[i] - ul[i]));
  return out;
}

namespace kinetic {

using gasdyn::State;

enum class Side { Plus, Minus };

// Half fluxes of the Maxwellian over positive or negative particle velocities.
inline State half_flux(const State& u, Side side, double gamma = 1.4) {
  if (!(gamma > 1.0 && gamma < 3.0))
    throw UsageError("kinetic flux needs 1 < gamma < 3");
  double rho = u[0];
  if (!(rho > 0.0)) throw DomainError("kinetic flux: non-positive density");
  double p = gasdyn::pressure(u, gamma);
  if (!(p > 0.0)) throw DomainError("kinetic flux: non-positive pressure");
  double v = u[1] / rho;
  double lam = rho / (2.0 * p);
  double M = (3.0 - gamma) / (gamma - 1.0);
  double s = side == Side::Plus ? 1.0 : -1.0;
  double ec = erfc(-s * std::sqrt(lam) * v);
  double ex = std::exp(-lam * v * v) / std::sqrt(std::numbers::pi * lam);
  return {rho * (0.5 * v * ec + s * 0.5 * ex),
          rho * ((0.5 * v * v + 0.25 / lam) * ec + s * 0.5 * v * ex),
          rho * ((0.25 * v * v * v + (M + 3.0) / (8.0 * lam) * v) * ec +
                 s * (0.25 * v * v + (M + 2.0) / (8.0 * lam)) * ex)};
}

inline State flux(const State& ul, const State& ur, double gamma = 1.4) {
  State a = half_flux(ul, Side::Plus, gamma);
  State b = half_flux(ur, Side::Minus, gamma);
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

}  // namespace kinetic

}  // namespace gql
