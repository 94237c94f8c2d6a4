#pragma once

// Fixtures shared across the suites: reproducible random fields and states,
// and the two-charge scattering configuration most dynamical tests run on.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "rigidem/charge_shape.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/initial_data.hpp"
#include "rigidem/rng.hpp"
#include "rigidem/spectral_ops.hpp"

namespace helpers {

using namespace rigidem;

// White noise truncated to modes with every |m_c| <= mmax.  Band-limiting
// keeps spectral derivative tests exact and away from the Nyquist row.
inline VectorField band_limited_field(const Grid& g, std::uint64_t seed, int mmax) {
  VectorField f(g);
  Rng rng(seed);
  for (int c = 0; c < 3; ++c)
    for (std::int64_t i = 0; i < g.size(); ++i) f.comp(c)[i] = rng.normal();
  SpectralField hat = analyze(f);
  const int nzk = g.nzk();
  for (std::int64_t i = 0; i < g.spec_size(); ++i) {
    int iz = static_cast<int>(i % nzk);
    int iy = static_cast<int>((i / nzk) % g.n);
    int ix = static_cast<int>(i / (static_cast<std::int64_t>(nzk) * g.n));
    auto fold = [&](int idx) { return idx <= g.n / 2 ? idx : idx - g.n; };
    if (std::abs(fold(ix)) > mmax || std::abs(fold(iy)) > mmax || iz > mmax)
      hat.x[i] = hat.y[i] = hat.z[i] = 0.0;
  }
  return synthesize(hat);
}

// N particles with positions in the central half of the box, unit-scale
// momenta, and independent band-limited noise fields per charge slot.
inline PhaseSpacePoint random_state(const Grid& g, std::size_t n_charges, std::uint64_t seed) {
  PhaseSpacePoint phi;
  phi.grid = g;
  Rng rng(seed);
  for (std::size_t i = 0; i < n_charges; ++i) {
    ParticleState s;
    s.q = {g.L / 4 * (2 * rng.uniform() - 1), g.L / 4 * (2 * rng.uniform() - 1),
           g.L / 4 * (2 * rng.uniform() - 1)};
    s.p = {rng.normal(), rng.normal(), rng.normal()};
    s.m = 1.0;
    phi.particles.push_back(s);
    FieldPair fp;
    fp.E = band_limited_field(g, seed * 131 + 7 * i + 1, g.n / 4);
    fp.B = band_limited_field(g, seed * 131 + 7 * i + 4, g.n / 4);
    phi.fields.push_back(std::move(fp));
  }
  return phi;
}

struct TwoChargeFixture {
  Grid grid;
  std::vector<ChargeShape> shapes;
  PhaseSpacePoint state;
};

// Two equal charges approaching head-on along x, each dressed with its own
// comoving Coulomb field.  The geometry (L = 16, n = 32, R = 1.75) keeps both
// supports resolved and clear of the periodic images.
inline TwoChargeFixture scattering_pair(double e_total = 0.4) {
  TwoChargeFixture fx;
  fx.grid = make_grid(16.0, 32);
  fx.shapes = {make_charge_shape(1.75, e_total), make_charge_shape(1.75, e_total)};
  fx.state.grid = fx.grid;
  for (int i = 0; i < 2; ++i) {
    ParticleState s;
    s.m = 1.0;
    s.q = {i == 0 ? -0.75 : 0.75, 0.0, 0.0};
    s.p = {i == 0 ? 0.1 : -0.1, 0.0, 0.0};
    fx.state.particles.push_back(s);
    fx.state.fields.push_back(coulomb_soliton(s, fx.shapes[static_cast<std::size_t>(i)], fx.grid));
  }
  return fx;
}

inline double rel_diff(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace helpers
