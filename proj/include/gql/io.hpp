#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "mhd.hpp"

namespace gql::io {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

inline std::string snapshot_header(int nc) {
  std::string h = "x,y,rho,vx,vy,vz,Bx,By,Bz,p";
  for (int k = 1; k < nc; ++k) h += ",Y" + std::to_string(k);
  return h;
}

// One row per cell centre, rows ordered j-major then i.
template <int NC>
void write_snapshot(const std::string& path, const Grid2d<mmhd::State<NC>>& g,
                    const std::vector<mmhd::State<NC>>& avg, const mmhd::MixtureSpec<NC>& spec) {
  using L = mmhd::Layout<NC>;
  auto out = open_out(path);
  out << snapshot_header(NC) << '\n';
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto& u = avg[g.index(i, j)];
      double rho = u[L::kRho];
      out << num(g.xc(i)) << ',' << num(g.yc(j)) << ',' << num(rho);
      for (int d = 0; d < 3; ++d) out << ',' << num(u[L::kMom + d] / rho);
      for (int d = 0; d < 3; ++d) out << ',' << num(u[L::kMag + d]);
      out << ',' << num(mmhd::pressure<NC>(u, spec));
      for (int k = 0; k < NC - 1; ++k) out << ',' << num(u[k] / rho);
      out << '\n';
    }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return int(c);
    throw UsageError("no column named " + name);
  }
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, sep)) out.push_back(f);
  return out;
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(line, ',')) row.push_back(std::stod(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct BoundsRecord {
  long step = 0;
  double t = 0, dt = 0, min_rho = 0, min_p = 0, min_Y = 0, max_Y = 0, max_absdiv = 0, eps = 0;
};

inline void write_bounds_log(const std::string& path, const std::vector<BoundsRecord>& rec) {
  auto out = open_out(path);
  out << "step,t,dt,min_rho,min_p,min_Y,max_Y,max_absdiv,eps\n";
  for (const auto& r : rec)
    out << r.step << ',' << num(r.t) << ',' << num(r.dt) << ',' << num(r.min_rho) << ','
        << num(r.min_p) << ',' << num(r.min_Y) << ',' << num(r.max_Y) << ',' << num(r.max_absdiv)
        << ',' << num(r.eps) << '\n';
}

// Per-step viscosities and the effective CFL number actually used.
struct CflRecord {
  long step = 0;
  double alpha1 = 0, alpha2 = 0, lambda_eff = 0, max_div_minus = 0;
  int retries = 0;
};

inline void write_cfl_log(const std::string& path, const std::vector<CflRecord>& rec) {
  auto out = open_out(path);
  out << "step,alpha1,alpha2,lambda_eff,max_div_minus,retries\n";
  for (const auto& r : rec)
    out << r.step << ',' << num(r.alpha1) << ',' << num(r.alpha2) << ',' << num(r.lambda_eff) << ','
        << num(r.max_div_minus) << ',' << r.retries << '\n';
}

// Grayscale image of one column, linearly scaled between its min and max;
// the scaling goes to a sidecar text file. Row 0 of the image is the top.
inline void write_pgm(const std::string& path, const std::vector<double>& v, int nx, int ny,
                      const std::string& label) {
  if (v.size() != std::size_t(nx) * ny) throw UsageError("pgm: size mismatch");
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  auto out = open_out(path);
  out << "P5\n" << nx << ' ' << ny << "\n255\n";
  for (int j = ny - 1; j >= 0; --j)
    for (int i = 0; i < nx; ++i) {
      double s = hi > lo ? (v[std::size_t(j) * nx + i] - lo) / (hi - lo) : 0.0;
      out.put(char(static_cast<unsigned char>(std::clamp(int(s * 255.0 + 0.5), 0, 255))));
    }
  auto side = open_out(path + ".txt");
  side << "column " << label << "\nmin " << num(lo) << "\nmax " << num(hi) << "\n";
}

}  // namespace gql::io
