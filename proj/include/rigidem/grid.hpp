#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "rigidem/errors.hpp"
#include "rigidem/vec3.hpp"

namespace rigidem {

// Uniform periodic grid on the cube [-L/2, L/2)^3 with n points per axis.
// Real-space storage is row-major with z fastest: index = (ix*n + iy)*n + iz.
// Half-complex (real transform) storage keeps kz >= 0 only, with n/2+1 points
// on the z axis: index = (ix*n + iy)*(n/2+1) + izk.
struct Grid {
  double L = 0.0;
  int n = 0;

  double dx() const { return L / n; }
  std::int64_t size() const { return std::int64_t(n) * n * n; }
  int nzk() const { return n / 2 + 1; }
  std::int64_t spec_size() const { return std::int64_t(n) * n * nzk(); }

  double cell_volume() const { return dx() * dx() * dx(); }

  double coord(int i) const { return (i - n / 2) * dx(); }
  Vec3 point(int ix, int iy, int iz) const { return {coord(ix), coord(iy), coord(iz)}; }

  std::int64_t index(int ix, int iy, int iz) const {
    return (std::int64_t(ix) * n + iy) * n + iz;
  }
  std::int64_t spec_index(int ix, int iy, int izk) const {
    return (std::int64_t(ix) * n + iy) * nzk() + izk;
  }

  // Integer mode number for axis index i, in [-n/2, n/2).
  int mode(int i) const { return i < n / 2 ? i : i - n; }

  // Angular wavenumber 2*pi*mode/L for axis index i.
  double wavenumber(int i) const { return 2.0 * std::numbers::pi * mode(i) / L; }

  // Wavenumber used in derivative multipliers.  The Nyquist plane carries no
  // sign information for odd derivatives on a real grid, so it is dropped;
  // this keeps ik-multiplied spectra conjugate symmetric.
  double deriv_wavenumber(int i) const {
    if (i == n / 2) return 0.0;
    return wavenumber(i);
  }

  // Weight of a half-complex entry in full-spectrum sums: interior kz planes
  // stand for a conjugate pair.
  double hermitian_weight(int izk) const { return (izk == 0 || izk == n / 2) ? 1.0 : 2.0; }

  // Reduce a coordinate into [-L/2, L/2).
  double wrap(double x) const {
    double y = std::remainder(x, L);
    if (y >= L / 2) y -= L;
    if (y < -L / 2) y += L;
    return y;
  }
  Vec3 wrap(Vec3 p) const { return {wrap(p.x), wrap(p.y), wrap(p.z)}; }

  // Shortest periodic displacement from b to a.
  Vec3 displacement(Vec3 a, Vec3 b) const { return wrap(a - b); }

  bool operator==(const Grid&) const = default;
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline Grid make_grid(double L, int n) {
  if (!(L > 0.0)) throw ConfigError("grid edge length must be positive, got " + std::to_string(L));
  if (n < 8 || !is_power_of_two(n))
    throw ConfigError("grid points per axis must be a power of two and at least 8, got " +
                      std::to_string(n));
  return Grid{L, n};
}

}  // namespace rigidem
