#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/spectral_ops.hpp"

using namespace rigidem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_abs(const VectorField& f) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::int64_t i = 0; i < f.grid.size(); ++i)
      m = std::max(m, std::abs(f.comp(c)[static_cast<std::size_t>(i)]));
  return m;
}

double max_abs_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::int64_t i = 0; i < a.grid.size(); ++i)
      m = std::max(m, std::abs(a.comp(c)[static_cast<std::size_t>(i)] -
                               b.comp(c)[static_cast<std::size_t>(i)]));
  return m;
}

double pair_norm(const FieldPair& f) {
  double e = l2_norm(f.E);
  double b = l2_norm(f.B);
  return std::sqrt(e * e + b * b);
}

double pair_rel_diff(const FieldPair& a, const FieldPair& b) {
  FieldPair diff{a.E.grid};
  for (int c = 0; c < 3; ++c)
    for (std::int64_t i = 0; i < a.E.grid.size(); ++i) {
      std::size_t s = static_cast<std::size_t>(i);
      diff.E.comp(c)[s] = a.E.comp(c)[s] - b.E.comp(c)[s];
      diff.B.comp(c)[s] = a.B.comp(c)[s] - b.B.comp(c)[s];
    }
  double scale = std::max(pair_norm(a), pair_norm(b));
  return scale == 0.0 ? 0.0 : pair_norm(diff) / scale;
}

}  // namespace

TEST_CASE("grid geometry and mode bookkeeping") {
  Grid g = make_grid(16.0, 32);

  REQUIRE(g.dx() == 0.5);
  REQUIRE(g.cell_volume() == 0.125);
  REQUIRE(g.size() == 32768);
  REQUIRE(g.nzk() == 17);
  REQUIRE(g.coord(16) == 0.0);
  REQUIRE(g.coord(0) == -8.0);

  SECTION("wrap maps into the centered box") {
    REQUIRE_THAT(g.wrap(8.5), WithinAbs(-7.5, 1e-14));
    REQUIRE_THAT(g.wrap(-8.5), WithinAbs(7.5, 1e-14));
    REQUIRE(g.wrap(3.25) == 3.25);
  }

  SECTION("mode folding and wavenumbers") {
    REQUIRE(g.mode(0) == 0);
    REQUIRE(g.mode(1) == 1);
    REQUIRE(g.mode(31) == -1);
    REQUIRE(g.mode(16) == -16);
    REQUIRE_THAT(g.wavenumber(1), WithinRel(2.0 * std::numbers::pi / 16.0, 1e-15));
    // The Nyquist row has no signed partner, so derivatives treat it as zero.
    REQUIRE(g.deriv_wavenumber(16) == 0.0);
    REQUIRE(g.deriv_wavenumber(1) == g.wavenumber(1));
  }

  SECTION("construction rejects unusable parameters") {
    REQUIRE_THROWS_AS(make_grid(0.0, 32), ConfigError);
    REQUIRE_THROWS_AS(make_grid(-3.0, 32), ConfigError);
    REQUIRE_THROWS_AS(make_grid(16.0, 24), ConfigError);
    REQUIRE_THROWS_AS(make_grid(16.0, 4), ConfigError);
  }
}

TEST_CASE("transform round trip is exact to rounding") {
  Grid g = make_grid(16.0, 32);
  VectorField f = helpers::band_limited_field(g, 42, g.n / 2);
  VectorField back = synthesize(analyze(f));
  REQUIRE(max_abs_diff(f, back) < 1e-13 * max_abs(f));
}

TEST_CASE("spectral derivatives reproduce closed forms") {
  Grid g = make_grid(16.0, 32);

  SECTION("constant fields have zero curl and divergence") {
    VectorField f(g);
    for (int c = 0; c < 3; ++c)
      for (std::int64_t i = 0; i < g.size(); ++i) f.comp(c)[static_cast<std::size_t>(i)] = 2.5;
    VectorField cf = spectral_curl(f);
    RealBuffer dv = spectral_divergence(f);
    REQUIRE(max_abs(cf) < 1e-13);
    double dmax = 0.0;
    for (double v : dv) dmax = std::max(dmax, std::abs(v));
    REQUIRE(dmax < 1e-13);
  }

  SECTION("single-mode sine has the textbook curl") {
    double k = 2.0 * std::numbers::pi / g.L;
    VectorField f(g);
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz)
          f.y[static_cast<std::size_t>(g.index(ix, iy, iz))] = std::sin(k * g.coord(ix));
    VectorField cf = spectral_curl(f, g);
    double worst = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz) {
          std::size_t s = static_cast<std::size_t>(g.index(ix, iy, iz));
          worst = std::max(worst, std::abs(cf.z[s] - k * std::cos(k * g.coord(ix))));
          worst = std::max(worst, std::abs(cf.x[s]));
          worst = std::max(worst, std::abs(cf.y[s]));
        }
    REQUIRE(worst < 1e-12);
  }

  SECTION("divergence of a curl vanishes") {
    VectorField f = helpers::band_limited_field(g, 7, g.n / 4);
    RealBuffer dv = spectral_divergence(spectral_curl(f));
    double dmax = 0.0;
    for (double v : dv) dmax = std::max(dmax, std::abs(v));
    REQUIRE(dmax < 1e-12 * max_abs(f));
  }

  SECTION("divergence of a gradient is the Laplacian") {
    double k = 2.0 * std::numbers::pi / g.L;
    VectorField grad(g);
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz)
          grad.x[static_cast<std::size_t>(g.index(ix, iy, iz))] =
              k * std::cos(k * g.coord(ix));
    RealBuffer dv = spectral_divergence(grad, g);
    double worst = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz)
          worst = std::max(worst,
                           std::abs(dv[static_cast<std::size_t>(g.index(ix, iy, iz))] +
                                    k * k * std::sin(k * g.coord(ix))));
    REQUIRE(worst < 1e-12);
  }

  SECTION("grid mismatch is rejected") {
    Grid other = make_grid(8.0, 16);
    VectorField f(g);
    REQUIRE_THROWS_AS(spectral_curl(f, other), ConfigError);
    REQUIRE_THROWS_AS(spectral_divergence(f, other), ConfigError);
  }
}

TEST_CASE("free flow reproduces traveling waves exactly") {
  Grid g = make_grid(16.0, 32);
  FieldPair wave = plane_wave(g, {1, 0, 0}, {0.0, 0.0, 1.0}, 0.7);

  SECTION("t = 0 is the identity up to one transform round trip") {
    FieldPair out = free_propagate(wave, 0.0);
    REQUIRE(pair_rel_diff(out, wave) < 1e-13);
  }

  SECTION("one box crossing returns the lowest mode to itself") {
    FieldPair out = free_propagate(wave, g.L);
    REQUIRE(pair_rel_diff(out, wave) < 1e-11);
  }

  SECTION("quarter period matches the shifted closed form") {
    FieldPair out = free_propagate(wave, g.L / 4.0);
    double k = 2.0 * std::numbers::pi / g.L;
    double worst = 0.0;
    for (int ix = 0; ix < g.n; ++ix) {
      // cos(k x - pi/2) = sin(k x): the crest moves toward +x.
      double expect = 0.7 * std::sin(k * g.coord(ix));
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz) {
          std::size_t s = static_cast<std::size_t>(g.index(ix, iy, iz));
          worst = std::max(worst, std::abs(out.E.z[s] - expect));
          worst = std::max(worst, std::abs(out.B.y[s] + expect));
        }
    }
    REQUIRE(worst < 1e-12);
  }

  SECTION("curl-free electric fields do not move") {
    double k = 2.0 * std::numbers::pi / g.L;
    FieldPair fp{g};
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz)
          fp.E.x[static_cast<std::size_t>(g.index(ix, iy, iz))] =
              std::sin(k * g.coord(ix));
    FieldPair out = free_propagate(fp, 1.7);
    REQUIRE(pair_rel_diff(out, fp) < 1e-12);
    REQUIRE(max_abs(out.B) < 1e-13);
  }
}

TEST_CASE("free flow is a unitary group") {
  Grid g = make_grid(16.0, 32);
  FieldPair f{g};
  f.E = helpers::band_limited_field(g, 11, g.n / 4);
  f.B = helpers::band_limited_field(g, 12, g.n / 4);

  SECTION("composition matches the summed time") {
    FieldPair two_steps = free_propagate(free_propagate(f, 0.6), 1.1);
    FieldPair one_step = free_propagate(f, 1.7);
    REQUIRE(pair_rel_diff(two_steps, one_step) < 1e-11);
  }

  SECTION("backward flow inverts forward flow") {
    FieldPair back = free_propagate(free_propagate(f, 2.3), -2.3);
    REQUIRE(pair_rel_diff(back, f) < 1e-11);
  }

  SECTION("the unweighted pair norm is conserved") {
    double n0 = pair_norm(f);
    for (double t : {0.25, 1.0, 4.0, 16.0}) {
      FieldPair out = free_propagate(f, t);
      REQUIRE_THAT(pair_norm(out), WithinRel(n0, 1e-12));
    }
  }

  SECTION("divergence structure is transported unchanged") {
    RealBuffer d0 = spectral_divergence(f.E);
    FieldPair out = free_propagate(f, 1.3);
    RealBuffer d1 = spectral_divergence(out.E);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < d0.size(); ++i) {
      worst = std::max(worst, std::abs(d1[i] - d0[i]));
      scale = std::max(scale, std::abs(d0[i]));
    }
    REQUIRE(worst < 1e-12 * scale);
  }

  SECTION("the attached spectra stay in sync with the samples") {
    FieldPair out = free_propagate(f, 0.9);
    REQUIRE(out.spectral_cache.has_value());
    SpectralField fresh = analyze(out.E);
    double worst = 0.0;
    for (std::size_t i = 0; i < fresh.x.size(); ++i)
      worst = std::max({worst, std::abs(fresh.x[i] - out.spectral_cache->E.x[i]),
                        std::abs(fresh.y[i] - out.spectral_cache->E.y[i]),
                        std::abs(fresh.z[i] - out.spectral_cache->E.z[i])});
    REQUIRE(worst < 1e-13 * max_abs(out.E));
  }
}

TEST_CASE("phase-space free flow leaves particles in place") {
  Grid g = make_grid(16.0, 32);
  PhaseSpacePoint phi = helpers::random_state(g, 2, 99);
  PhaseSpacePoint out = propagate_phase(phi, 1.25);
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(out.particles[i].q.x == phi.particles[i].q.x);
    REQUIRE(out.particles[i].q.y == phi.particles[i].q.y);
    REQUIRE(out.particles[i].q.z == phi.particles[i].q.z);
    REQUIRE(out.particles[i].p.x == phi.particles[i].p.x);
  }
  REQUIRE(pair_rel_diff(out.fields[0], phi.fields[0]) > 1e-6);
}

TEST_CASE("transverse projection splits gradient from curl content") {
  Grid g = make_grid(16.0, 32);

  SECTION("a pure gradient is removed entirely") {
    double k = 2.0 * std::numbers::pi / g.L;
    VectorField grad(g);
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz)
          grad.x[static_cast<std::size_t>(g.index(ix, iy, iz))] =
              std::cos(k * g.coord(ix));
    double before = l2_norm(grad);
    SpectralField hat = analyze(grad);
    double removed = transverse_project(hat);
    VectorField after = synthesize(hat);
    REQUIRE_THAT(removed, WithinRel(before, 1e-12));
    REQUIRE(l2_norm(after) < 1e-12 * before);
  }

  SECTION("a transverse wave passes through untouched") {
    FieldPair wave = plane_wave(g, {0, 1, 0}, {1.0, 0.0, 0.0}, 1.0);
    double before = l2_norm(wave.E);
    SpectralField hat = analyze(wave.E);
    double removed = transverse_project(hat);
    VectorField after = synthesize(hat);
    REQUIRE(removed < 1e-12 * before);
    REQUIRE(max_abs_diff(after, wave.E) < 1e-13);
  }

  SECTION("projection is idempotent") {
    VectorField f = helpers::band_limited_field(g, 5, g.n / 4);
    SpectralField hat = analyze(f);
    transverse_project(hat);
    double second = transverse_project(hat);
    REQUIRE(second < 1e-12 * l2_norm(f));
  }
}
