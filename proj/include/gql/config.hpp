#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace gql {

// Flat `key = value` configuration; `#` starts a comment.
class Config {
 public:
  static Config parse(std::istream& in) {
    Config c;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::string t = trim(line);
      if (t.empty()) continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw UsageError("config line " + std::to_string(no) + ": expected key = value");
      std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
      if (k.empty()) throw UsageError("config line " + std::to_string(no) + ": empty key");
      c.kv_[k] = v;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    return parse(in);
  }

  // Parses "key=value" as given on the command line.
  void set_assignment(const std::string& a) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got " + a);
    kv_[trim(a.substr(0, eq))] = trim(a.substr(eq + 1));
  }

  void set(const std::string& k, const std::string& v) { kv_[k] = v; }
  bool has(const std::string& k) const { return kv_.count(k) != 0; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

  std::string get(const std::string& k, const std::string& def) const {
    auto it = kv_.find(k);
    return it == kv_.end() ? def : it->second;
  }

  double get(const std::string& k, double def) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return def;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) throw UsageError("config: " + k + " is not a number");
    return v;
  }

  int get(const std::string& k, int def) const {
    double v = get(k, double(def));
    if (v != double(int(v))) throw UsageError("config: " + k + " must be an integer");
    return int(v);
  }

  bool get(const std::string& k, bool def) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return def;
    const std::string& v = it->second;
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config: " + k + " must be on/off");
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> kv_;
};

struct RunConfig {
  std::string experiment = "blast";
  std::string system = "euler";  // run1d: euler | ns; run2d: tenmoment | mmhd
  std::string flux = "lf";       // run1d: lf | gk
  int nx = 100, ny = 100;
  double x0 = -0.5, x1 = 0.5, y0 = -0.5, y1 = 0.5;
  double t_end = 0.01;
  double cfl = 0.15;
  int max_steps = 0;  // 0: unlimited
  bool limiter = true;
  bool source_term = true;
  double tvb = 50.0;  // negative disables
  int output_every = 0;  // steps between snapshots; 0 writes the final state only
  std::string output_dir = "out";
  std::string pgm_column;  // empty: no image
  unsigned long long seed = 1;
  double reynolds = 100.0, prandtl = 0.72, eta = 1.0;

  void validate() const {
    static const char* known[] = {"blast", "jet", "run1d", "run2d", "verify"};
    bool ok = false;
    for (auto* k : known) ok = ok || experiment == k;
    if (!ok) throw UsageError("unknown experiment " + experiment);
    if (nx < 1 || ny < 1) throw UsageError("grid sizes must be positive");
    if (!(x1 > x0) || !(y1 > y0)) throw UsageError("empty domain box");
    if (!(t_end > 0.0)) throw UsageError("t_end must be positive");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw UsageError("cfl must lie in (0, 1]");
    if (output_every < 0 || max_steps < 0) throw UsageError("negative cadence or step limit");
  }
};

inline RunConfig default_config(const std::string& experiment) {
  RunConfig c;
  c.experiment = experiment;
  if (experiment == "blast" || experiment == "jet") c.system = "mmhd";
  if (experiment == "jet") {
    c.nx = 50, c.ny = 150;
    c.x0 = 0.0, c.x1 = 0.5, c.y0 = 0.0, c.y1 = 1.5;
    c.t_end = 0.001;
  } else if (experiment == "run1d") {
    c.nx = 200, c.ny = 1;
    c.x0 = -0.5, c.x1 = 0.5;
    c.t_end = 0.1;
    c.cfl = 1.0;
  } else if (experiment == "run2d") {
    c.system = "tenmoment";
    c.nx = c.ny = 50;
    c.x0 = c.y0 = 0.0, c.x1 = c.y1 = 1.0;
    c.t_end = 1.0;
    c.max_steps = 20;
    c.cfl = 1.0 - 1e-12;
  }
  return c;
}

inline RunConfig apply_config(RunConfig c, const Config& f) {
  c.experiment = f.get("experiment", c.experiment);
  c.system = f.get("system", c.system);
  c.flux = f.get("flux", c.flux);
  c.nx = f.get("grid.nx", c.nx);
  c.ny = f.get("grid.ny", c.ny);
  c.x0 = f.get("domain.x0", c.x0);
  c.x1 = f.get("domain.x1", c.x1);
  c.y0 = f.get("domain.y0", c.y0);
  c.y1 = f.get("domain.y1", c.y1);
  c.t_end = f.get("time.t_end", c.t_end);
  c.cfl = f.get("time.cfl", c.cfl);
  c.max_steps = f.get("time.max_steps", c.max_steps);
  c.limiter = f.get("limiter", c.limiter);
  c.source_term = f.get("source_term", c.source_term);
  c.tvb = f.get("tvb", c.tvb);
  c.output_every = f.get("output.every", c.output_every);
  c.output_dir = f.get("output.dir", c.output_dir);
  c.pgm_column = f.get("output.pgm", c.pgm_column);
  c.seed = static_cast<unsigned long long>(f.get("seed", double(c.seed)));
  c.reynolds = f.get("ns.reynolds", c.reynolds);
  c.prandtl = f.get("ns.prandtl", c.prandtl);
  c.eta = f.get("ns.eta", c.eta);
  c.validate();
  return c;
}

}  // namespace gql
