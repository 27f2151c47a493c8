#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace gql {

enum class BoundaryKind { Periodic, Outflow, Dirichlet, Custom };

// Boundary treatment on one side. Custom ghosts receive the interior state
// next to the boundary and the coordinate along the side.
template <class State>
struct SideBc {
  BoundaryKind kind = BoundaryKind::Periodic;
  State value{};
  std::function<State(const State& interior, double s)> ghost;

  static SideBc periodic() { return {}; }
  static SideBc outflow() { return {BoundaryKind::Outflow, {}, {}}; }
  static SideBc dirichlet(const State& v) { return {BoundaryKind::Dirichlet, v, {}}; }
  static SideBc custom(std::function<State(const State&, double)> f) {
    return {BoundaryKind::Custom, {}, std::move(f)};
  }

  State apply(const State& interior, double s) const {
    switch (kind) {
      case BoundaryKind::Outflow: return interior;
      case BoundaryKind::Dirichlet: return value;
      case BoundaryKind::Custom: return ghost(interior, s);
      default: throw UsageError("periodic sides have no ghost function");
    }
  }
};

template <class State>
struct Grid1d {
  int n_cells = 0;
  double dx = 0.0;
  double x0 = 0.0;
  SideBc<State> left, right;

  void validate() const {
    if (n_cells < 1 || !(dx > 0.0)) throw UsageError("Grid1d: need n_cells >= 1 and dx > 0");
    if ((left.kind == BoundaryKind::Periodic) != (right.kind == BoundaryKind::Periodic))
      throw UsageError("Grid1d: periodic boundaries must be paired");
  }
  double center(int i) const { return x0 + (i + 0.5) * dx; }
};

enum Side { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

template <class State>
struct Grid2d {
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  double x0 = 0.0, y0 = 0.0;
  std::array<SideBc<State>, 4> bc;

  void validate() const {
    if (nx < 1 || ny < 1 || !(dx > 0.0) || !(dy > 0.0))
      throw UsageError("Grid2d: need positive sizes and spacings");
    auto per = [&](int s) { return bc[s].kind == BoundaryKind::Periodic; };
    if (per(kLeft) != per(kRight) || per(kBottom) != per(kTop))
      throw UsageError("Grid2d: periodic boundaries must be paired");
  }
  std::size_t cells() const { return std::size_t(nx) * std::size_t(ny); }
  std::size_t index(int i, int j) const { return std::size_t(j) * nx + i; }
  double xc(int i) const { return x0 + (i + 0.5) * dx; }
  double yc(int j) const { return y0 + (j + 0.5) * dy; }
};

// Min/max of a monitored quantity over the field.
struct Bound {
  std::string name;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
};

struct StepReport {
  double dt = 0.0;
  std::array<double, 2> alpha{0.0, 0.0};
  std::vector<Bound> bounds;
  bool violation = false;
  std::string witness;
  double max_abs_div = 0.0;
  long audit_checks = 0;
  long audit_failures = 0;

  Bound& bound(const std::string& name) {
    for (auto& b : bounds)
      if (b.name == name) return b;
    bounds.push_back({name});
    return bounds.back();
  }
  const Bound* find(const std::string& name) const {
    for (const auto& b : bounds)
      if (b.name == name) return &b;
    return nullptr;
  }
  void flag(const std::string& why) {
    if (!violation) witness = why;
    violation = true;
  }
};

}  // namespace gql
