#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rigidem/errors.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/vec3.hpp"

namespace rigidem {

// One-dimensional moment of the standard bump, integral_0^1 s^2 e^{-1/(1-s^2)} ds,
// fixed by high-precision quadrature (tests/oracles/bump_integrals.py).
inline constexpr double kBumpMomentI0 = 0.035100738376487705;

// Smooth compactly supported charge distribution
//   rho(x) = amplitude * exp(-1/(1 - (r/R)^2))   for r < R, zero beyond.
// The amplitude is the continuum normalization e_total / (4 pi R^3 I0); grid
// deposits rescale it against their own quadrature (see deposit_shape), which
// is what keeps total-charge identities exact on every grid.
struct ChargeShape {
  double R = 1.0;
  double e_total = 1.0;
  double amplitude = 0.0;
  std::vector<double> profile;  // samples at r = k/(samples-1) * R

  double operator()(double r) const {
    double s = r / R;
    if (s >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / (1.0 - s * s));
  }
};

inline ChargeShape make_charge_shape(double R, double e_total, int profile_samples = 257) {
  if (!(R > 0.0)) throw ConfigError("charge support radius must be positive, got " +
                                    std::to_string(R));
  if (profile_samples < 2) throw ConfigError("profile needs at least 2 samples");
  ChargeShape shape;
  shape.R = R;
  shape.e_total = e_total;
  shape.amplitude = e_total / (4.0 * std::numbers::pi * R * R * R * kBumpMomentI0);
  shape.profile.resize(static_cast<std::size_t>(profile_samples));
  for (int k = 0; k < profile_samples; ++k)
    shape.profile[static_cast<std::size_t>(k)] = shape(R * k / (profile_samples - 1));
  return shape;
}

// Grid samples of rho(. - q): flat cell indices (periodically wrapped) and
// values, renormalized so the grid quadrature of the deposit is exactly
// e_total.  The raw bump only converges slowly to its continuum integral
// under grid sums, so without this rescale no total-charge identity would
// survive discretization.
struct Deposit {
  std::vector<std::int64_t> cells;
  std::vector<double> values;
  double cell_volume = 0.0;
};

inline Deposit deposit_shape(const Grid& g, const ChargeShape& shape, Vec3 q) {
  if (2.0 * shape.R >= g.L / 2.0)
    throw GeometryError("charge support diameter " + std::to_string(2.0 * shape.R) +
                        " straddles more than half the box (L/2 = " + std::to_string(g.L / 2.0) +
                        ")");
  double dx = g.dx();
  Vec3 qw = g.wrap(q);
  int bx = static_cast<int>(std::lround((qw.x + g.L / 2) / dx));
  int by = static_cast<int>(std::lround((qw.y + g.L / 2) / dx));
  int bz = static_cast<int>(std::lround((qw.z + g.L / 2) / dx));
  int w = static_cast<int>(shape.R / dx) + 2;

  Deposit dep;
  dep.cell_volume = g.cell_volume();
  dep.cells.reserve(static_cast<std::size_t>(8 * w * w * w / 3));
  dep.values.reserve(dep.cells.capacity());
  double sum = 0.0;
  for (int ox = -w; ox <= w; ++ox) {
    double px = g.wrap((bx + ox) * dx - g.L / 2 - qw.x);
    for (int oy = -w; oy <= w; ++oy) {
      double py = g.wrap((by + oy) * dx - g.L / 2 - qw.y);
      for (int oz = -w; oz <= w; ++oz) {
        double pz = g.wrap((bz + oz) * dx - g.L / 2 - qw.z);
        double r = std::sqrt(px * px + py * py + pz * pz);
        if (r >= shape.R) continue;
        double v = shape(r);
        if (v == 0.0) continue;
        int ix = ((bx + ox) % g.n + g.n) % g.n;
        int iy = ((by + oy) % g.n + g.n) % g.n;
        int iz = ((bz + oz) % g.n + g.n) % g.n;
        dep.cells.push_back(g.index(ix, iy, iz));
        dep.values.push_back(v);
        sum += v;
      }
    }
  }
  if (shape.e_total == 0.0) return dep;  // neutral marker, identically zero density
  // Every sample carries the sign of the amplitude, so only a vanishing
  // magnitude signals that the grid missed the support entirely.
  if (dep.cells.empty() || !(std::abs(sum) > 0.0))
    throw GeometryError("charge support (R = " + std::to_string(shape.R) +
                        ") is unresolved by the grid spacing " + std::to_string(dx));
  double rescale = shape.e_total / (sum * dep.cell_volume);
  for (double& v : dep.values) v *= rescale;
  return dep;
}

}  // namespace rigidem
