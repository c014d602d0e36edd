#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lagpath/diagnostics.hpp"
#include "lagpath/errors.hpp"
#include "lagpath/particles.hpp"
#include "lagpath/taylor.hpp"

namespace lagpath {

// Round-trip formatting; identical bits give identical text.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::string& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw config_error("cannot open output file " + path);
    out_ << header << '\n';
  }
  void row(const std::string& line) { out_ << line << '\n'; }
  void close() {
    out_.flush();
    if (!out_) throw numerical_failure("write error");
    out_.close();
  }

 private:
  std::ofstream out_;
};

template <std::size_t D>
std::string state_header() {
  std::string h = "t,particle_id";
  for (std::size_t i = 1; i <= D; ++i) h += ",a" + std::to_string(i);
  for (std::size_t i = 1; i <= D; ++i) h += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= D; ++i)
    for (std::size_t j = 1; j <= D; ++j) h += ",g" + std::to_string(i) + std::to_string(j);
  return h + ",theta0";
}

template <std::size_t D>
void write_state_rows(CsvFile& f, const ParticleState<D>& s) {
  const std::string t = fmt(s.t);
  for (std::size_t p = 0; p < s.size(); ++p) {
    std::string line = t + "," + std::to_string(p);
    for (std::size_t i = 0; i < D; ++i) line += "," + fmt(s.a[p][i]);
    for (std::size_t i = 0; i < D; ++i) line += "," + fmt(s.x[p][i]);
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) line += "," + fmt(s.g[p][i][j]);
    line += "," + fmt(p < s.theta0.size() ? s.theta0[p] : std::nan(""));
    f.row(line);
  }
}

inline const char* kDiagnosticsHeader = "t,chord_min,chord_max,lambda_bound,grad_u_sup,det_dev,hamiltonian,p1,p2,ang_imp";

inline void write_diagnostics_row(CsvFile& f, const DiagnosticsRecord& r) {
  f.row(fmt(r.t) + "," + fmt(r.chord_min) + "," + fmt(r.chord_max) + "," + fmt(r.lambda_bound) + "," + fmt(r.grad_u_sup) +
        "," + fmt(r.det_dev) + "," + fmt(r.hamiltonian) + "," + fmt(r.p1) + "," + fmt(r.p2) + "," + fmt(r.ang_imp));
}

inline const char* kTaylorHeader = "particle_id,n,coef_norm,ratio_est,root_est";

inline void write_taylor_rows(CsvFile& f, const std::vector<std::vector<double>>& norms) {
  for (std::size_t p = 0; p < norms.size(); ++p)
    for (std::size_t n = 0; n < norms[p].size(); ++n)
      f.row(std::to_string(p) + "," + std::to_string(n) + "," + fmt(norms[p][n]) + "," + fmt(order_ratio(norms[p], n)) + "," +
            fmt(order_root(norms[p], n)));
}

}  // namespace lagpath
