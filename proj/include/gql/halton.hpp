#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace gql {

inline constexpr std::array<std::uint32_t, 24> kHaltonPrimes = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37,
    41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

inline double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Halton points in the open unit cube, rotated by a seed-dependent shift.
class AuxSample {
 public:
  AuxSample(std::size_t budget, std::uint64_t seed) : budget_(budget), seed_(seed) {
    if (budget == 0) throw UsageError("AuxSample: budget must be at least 1");
  }

  std::size_t size() const { return budget_; }
  std::uint64_t seed() const { return seed_; }

  // Coordinates of point k in the first `dim` Halton dimensions.
  void point(std::size_t k, std::size_t dim, double* t) const {
    if (dim > kHaltonPrimes.size()) throw UsageError("AuxSample: dimension too large");
    for (std::size_t d = 0; d < dim; ++d) {
      double shift = static_cast<double>(splitmix64(seed_ * 131 + d) >> 11) * 0x1.0p-53;
      if (seed_ == 0) shift = 0.0;
      double v = radical_inverse(k + 1, kHaltonPrimes[d]) + shift;
      v -= std::floor(v);
      if (v <= 0.0) v = 0x1.0p-54;
      t[d] = v;
    }
  }

  std::vector<double> point(std::size_t k, std::size_t dim) const {
    std::vector<double> t(dim);
    point(k, dim, t.data());
    return t;
  }

 private:
  std::size_t budget_;
  std::uint64_t seed_;
};

}  // namespace gql
