#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rigidem/errors.hpp"

namespace rigidem {

enum class CouplingPreset { ML, ML_SI, custom };

inline CouplingPreset parse_coupling_preset(const std::string& s) {
  if (s == "ml" || s == "ML") return CouplingPreset::ML;
  if (s == "ml_si" || s == "ML_SI") return CouplingPreset::ML_SI;
  if (s == "custom") return CouplingPreset::custom;
  throw ConfigError("unknown coupling preset '" + s + "'");
}

// Which fields each charge feels.  The full dynamics couples every charge to
// every field including its own (all entries 1); the self-interaction-free
// variant zeroes the diagonal.
struct CouplingMatrix {
  CouplingPreset preset = CouplingPreset::ML;
  std::size_t N = 0;
  std::vector<double> e;  // row-major N x N

  double at(std::size_t i, std::size_t j) const { return e[i * N + j]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : e)
      if (std::abs(v) > m) m = std::abs(v);
    return m;
  }
};

inline CouplingMatrix make_coupling(CouplingPreset preset, std::size_t N) {
  if (preset == CouplingPreset::custom)
    throw ConfigError("custom coupling needs an explicit matrix, use make_custom_coupling");
  CouplingMatrix c;
  c.preset = preset;
  c.N = N;
  c.e.assign(N * N, 1.0);
  if (preset == CouplingPreset::ML_SI)
    for (std::size_t i = 0; i < N; ++i) c.e[i * N + i] = 0.0;
  return c;
}

inline CouplingMatrix make_custom_coupling(const std::vector<std::vector<double>>& rows) {
  CouplingMatrix c;
  c.preset = CouplingPreset::custom;
  c.N = rows.size();
  for (const auto& row : rows) {
    if (row.size() != c.N)
      throw ConfigError("custom coupling matrix must be square, row has " +
                        std::to_string(row.size()) + " entries for N = " + std::to_string(c.N));
    c.e.insert(c.e.end(), row.begin(), row.end());
  }
  return c;
}

}  // namespace rigidem
