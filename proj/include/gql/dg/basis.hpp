#pragma once

#include <array>
#include <cmath>

#include "../errors.hpp"

// Degree-2 modal bases on the reference square [-1,1]^2 with the averaged
// inner product (1/4) * integral.
namespace gql::dg {

inline constexpr int kModes = 6;
inline constexpr int kMagModes = 9;
inline constexpr int kGauss = 3;

struct Quadrature {
  static constexpr std::array<double, 3> gauss_x = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gauss_w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  static constexpr std::array<double, 3> lobatto_x = {-1.0, 0.0, 1.0};
  static constexpr std::array<double, 3> lobatto_w = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
};

// Smallest Gauss-Lobatto weight, the CFL bound of the high-order scheme.
inline constexpr double kOmegaHat1 = 1.0 / 6.0;

struct ScalarBasis {
  static void eval(double x, double y, double* v) {
    const double s3 = std::sqrt(3.0), s5 = std::sqrt(5.0);
    v[0] = 1.0;
    v[1] = s3 * x;
    v[2] = s3 * y;
    v[3] = 0.5 * s5 * (3.0 * x * x - 1.0);
    v[4] = 3.0 * x * y;
    v[5] = 0.5 * s5 * (3.0 * y * y - 1.0);
  }
  static void grad(double x, double y, double* dx, double* dy) {
    const double s3 = std::sqrt(3.0), s5 = std::sqrt(5.0);
    dx[0] = 0.0, dy[0] = 0.0;
    dx[1] = s3, dy[1] = 0.0;
    dx[2] = 0.0, dy[2] = s3;
    dx[3] = 3.0 * s5 * x, dy[3] = 0.0;
    dx[4] = 3.0 * y, dy[4] = 3.0 * x;
    dx[5] = 0.0, dy[5] = 3.0 * s5 * y;
  }
};

// Orthonormal basis of divergence-free degree-2 vector fields for cells with
// aspect ratio r = dy / dx, built by Gram-Schmidt from monomial fields.
class DivFreeBasis {
 public:
  explicit DivFreeBasis(double r = 1.0) : r_(r) {
    if (!(r > 0.0)) throw UsageError("DivFreeBasis: aspect ratio must be positive");
    // coef_[j][k]: combination of raw fields k <= j.
    for (auto& row : coef_) row.fill(0.0);
    for (int j = 0; j < kMagModes; ++j) {
      std::array<double, kMagModes> c{};
      c[j] = 1.0;
      for (int k = 0; k < j; ++k) {
        double ip = inner_raw(c, coef_[k]);
        for (int l = 0; l < kMagModes; ++l) c[l] -= ip * coef_[k][l];
      }
      double n = std::sqrt(inner_raw(c, c));
      for (int l = 0; l < kMagModes; ++l) c[l] /= n;
      coef_[j] = c;
    }
  }

  double ratio() const { return r_; }

  // Components of all basis fields at (x, y).
  void eval(double x, double y, double* b1, double* b2) const {
    double r1[kMagModes], r2[kMagModes];
    raw(x, y, r1, r2);
    combine(r1, r2, b1, b2);
  }

  // Reference-coordinate partial derivatives of all basis fields.
  void grad(double x, double y, double* b1x, double* b1y, double* b2x, double* b2y) const {
    double r1x[kMagModes], r1y[kMagModes], r2x[kMagModes], r2y[kMagModes];
    raw_grad(x, y, r1x, r1y, r2x, r2y);
    combine(r1x, r2x, b1x, b2x);
    combine(r1y, r2y, b1y, b2y);
  }

 private:
  void raw(double x, double y, double* a, double* b) const {
    const double r = r_;
    double v1[kMagModes] = {1, 0, y, 0, x, y * y, 0, x * x, x * y};
    double v2[kMagModes] = {0, 1, 0, x, -r * y, 0, x * x, -2 * r * x * y, -0.5 * r * y * y};
    for (int k = 0; k < kMagModes; ++k) a[k] = v1[k], b[k] = v2[k];
  }
  void raw_grad(double x, double y, double* ax, double* ay, double* bx, double* by) const {
    const double r = r_;
    double g1x[kMagModes] = {0, 0, 0, 0, 1, 0, 0, 2 * x, y};
    double g1y[kMagModes] = {0, 0, 1, 0, 0, 2 * y, 0, 0, x};
    double g2x[kMagModes] = {0, 0, 0, 1, 0, 0, 2 * x, -2 * r * y, 0};
    double g2y[kMagModes] = {0, 0, 0, 0, -r, 0, 0, -2 * r * x, -r * y};
    for (int k = 0; k < kMagModes; ++k) ax[k] = g1x[k], ay[k] = g1y[k], bx[k] = g2x[k], by[k] = g2y[k];
  }
  void combine(const double* r1, const double* r2, double* b1, double* b2) const {
    for (int j = 0; j < kMagModes; ++j) {
      double s1 = 0.0, s2 = 0.0;
      for (int k = 0; k <= j; ++k) {
        s1 += coef_[j][k] * r1[k];
        s2 += coef_[j][k] * r2[k];
      }
      b1[j] = s1;
      b2[j] = s2;
    }
  }
  double inner_raw(const std::array<double, kMagModes>& a,
                   const std::array<double, kMagModes>& b) const {
    double s = 0.0;
    for (int i = 0; i < kGauss; ++i)
      for (int k = 0; k < kGauss; ++k) {
        double w = Quadrature::gauss_w[i] * Quadrature::gauss_w[k];
        double r1[kMagModes], r2[kMagModes];
        raw(Quadrature::gauss_x[i], Quadrature::gauss_x[k], r1, r2);
        double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
        for (int l = 0; l < kMagModes; ++l) {
          a1 += a[l] * r1[l];
          a2 += a[l] * r2[l];
          b1 += b[l] * r1[l];
          b2 += b[l] * r2[l];
        }
        s += w * (a1 * b1 + a2 * b2);
      }
    return s;
  }

  double r_;
  std::array<std::array<double, kMagModes>, kMagModes> coef_{};
};

// Reference points used by the solver and the limiter. Indices 0..11 are the
// edge Gauss points (left, right, bottom, top; three each), 12..16 the
// remaining interior points of the limiter set; volume points are separate.
struct PointSets {
  static constexpr int kEdgePoints = 12;
  static constexpr int kLimiterPoints = 17;
  static constexpr int kVolumePoints = 9;

  std::array<std::array<double, 2>, kLimiterPoints> limiter;
  std::array<std::array<double, 2>, kVolumePoints> volume;
  std::array<double, kVolumePoints> volume_w;

  PointSets() {
    const auto& g = Quadrature::gauss_x;
    for (int q = 0; q < 3; ++q) {
      limiter[q] = {-1.0, g[q]};
      limiter[3 + q] = {1.0, g[q]};
      limiter[6 + q] = {g[q], -1.0};
      limiter[9 + q] = {g[q], 1.0};
      limiter[12 + q] = {0.0, g[q]};
    }
    limiter[15] = {g[0], 0.0};
    limiter[16] = {g[2], 0.0};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        volume[a * 3 + b] = {g[a], g[b]};
        volume_w[a * 3 + b] = Quadrature::gauss_w[a] * Quadrature::gauss_w[b];
      }
  }

  static int edge_point(int side, int q) { return side * 3 + q; }
};

}  // namespace gql::dg
