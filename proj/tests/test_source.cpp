#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "rigidem/coupling.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/initial_data.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/source.hpp"
#include "rigidem/weights.hpp"

using namespace rigidem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Uniform field pair, the one configuration where the smeared force has a
// pointlike closed form e (E0 + v x B0).
FieldPair uniform_pair(const Grid& g, Vec3 e0, Vec3 b0) {
  FieldPair fp(g);
  for (int c = 0; c < 3; ++c) {
    double ev = c == 0 ? e0.x : (c == 1 ? e0.y : e0.z);
    double bv = c == 0 ? b0.x : (c == 1 ? b0.y : b0.z);
    for (std::int64_t i = 0; i < g.size(); ++i) {
      fp.E.comp(c)[i] = ev;
      fp.B.comp(c)[i] = bv;
    }
  }
  return fp;
}

}  // namespace

TEST_CASE("velocity stays inside the unit ball") {
  SECTION("rest and closed form") {
    REQUIRE(norm(velocity(Vec3{}, 1.0, 1.0)) == 0.0);
    Vec3 v = velocity(Vec3{3.0, -4.0, 0.0}, 1.0, 1.0);
    double scale = 1.0 / std::sqrt(26.0);
    REQUIRE_THAT(v.x, WithinRel(3.0 * scale, 1e-15));
    REQUIRE_THAT(v.y, WithinRel(-4.0 * scale, 1e-15));
    REQUIRE(v.z == 0.0);
  }

  SECTION("negative mass reverses the direction") {
    ParticleState s;
    s.p = {0.6, 0.0, 0.0};
    s.m = -2.0;
    Vec3 v = velocity(s);
    REQUIRE_THAT(v.x, WithinRel(-0.6 / std::sqrt(4.36), 1e-15));
    REQUIRE(v.y == 0.0);
  }

  SECTION("speed grows monotonically but never reaches one") {
    Vec3 dir{1.0, 1.0, 1.0};
    dir = (1.0 / norm(dir)) * dir;
    double prev = 0.0;
    for (int k = -8; k <= 12; ++k) {
      double pmag = std::pow(10.0, k);
      double s = norm(velocity(pmag * dir, 1.0, 1.0));
      REQUIRE(s < 1.0);
      // Past |p|/m ~ 1e8 the speed saturates at the largest double below one.
      if (k <= 7)
        REQUIRE(s > prev);
      else
        REQUIRE(s >= prev);
      prev = s;
    }
    // Beyond |p|/m ~ 1e8 the quotient would round to one; the map has to
    // leave room for the 1/(1 - |v|^2) factors downstream.
    Vec3 v = velocity(Vec3{1e12, 0.0, 0.0}, 1.0, 1.0);
    REQUIRE(norm2(v) < 1.0);
    REQUIRE(1.0 - norm2(v) > 0.0);
  }

  SECTION("massless particles are rejected") {
    REQUIRE_THROWS_AS(velocity(Vec3{1.0, 0.0, 0.0}, 0.0, 1.0), DomainError);
  }
}

TEST_CASE("uniform fields produce the pointlike Lorentz force") {
  Grid g = make_grid(16.0, 32);
  double e_total = 0.4;
  std::vector<ChargeShape> shapes{make_charge_shape(1.75, e_total)};

  PhaseSpacePoint phi;
  phi.grid = g;
  ParticleState s;
  s.q = {0.25, -0.5, 0.125};
  s.p = {0.3, 0.0, 0.0};
  phi.particles.push_back(s);
  Vec3 e0{0.2, -0.1, 0.5};
  Vec3 b0{0.1, 0.4, -0.3};
  phi.fields.push_back(uniform_pair(g, e0, b0));

  Vec3 v = velocity(s);
  Vec3 expect = e_total * (e0 + cross(v, b0));
  Vec3 f = lorentz_force(0, phi, shapes, make_coupling(CouplingPreset::ML, 1));
  REQUIRE_THAT(f.x, WithinRel(expect.x, 1e-12));
  REQUIRE_THAT(f.y, WithinRel(expect.y, 1e-12));
  REQUIRE_THAT(f.z, WithinRel(expect.z, 1e-12));

  SECTION("the force is linear in the coupling entries") {
    Vec3 doubled = lorentz_force(0, phi, shapes, make_custom_coupling({{2.0}}));
    REQUIRE_THAT(doubled.x, WithinRel(2.0 * f.x, 1e-13));
    REQUIRE_THAT(doubled.y, WithinRel(2.0 * f.y, 1e-13));
    REQUIRE_THAT(doubled.z, WithinRel(2.0 * f.z, 1e-13));
  }

  SECTION("a zeroed diagonal removes the force entirely") {
    Vec3 off = lorentz_force(0, phi, shapes, make_coupling(CouplingPreset::ML_SI, 1));
    REQUIRE(off.x == 0.0);
    REQUIRE(off.y == 0.0);
    REQUIRE(off.z == 0.0);
  }
}

TEST_CASE("a resting charge exerts no force on itself") {
  Grid g = make_grid(16.0, 32);
  double e_total = 0.4, radius = 1.75;
  std::vector<ChargeShape> shapes{make_charge_shape(radius, e_total)};

  PhaseSpacePoint phi;
  phi.grid = g;
  ParticleState s;
  phi.particles.push_back(s);
  phi.fields.push_back(coulomb_soliton(s, shapes[0], g));

  Vec3 f = lorentz_force(0, phi, shapes, make_coupling(CouplingPreset::ML, 1));
  double scale = e_total * e_total / (radius * radius);
  REQUIRE(norm(f) < 1e-10 * scale);
}

TEST_CASE("coupling rows select which fields act") {
  auto fx = helpers::scattering_pair();
  auto ml = make_coupling(CouplingPreset::ML, 2);
  auto ml_si = make_coupling(CouplingPreset::ML_SI, 2);

  Vec3 f_ml = lorentz_force(0, fx.state, fx.shapes, ml);
  Vec3 f_si = lorentz_force(0, fx.state, fx.shapes, ml_si);
  Vec3 f_own = lorentz_force(0, fx.state, fx.shapes, make_custom_coupling({{1.0, 0.0}, {0.0, 0.0}}));

  SECTION("the two presets differ by exactly the self term") {
    Vec3 diff = (f_ml - f_si) - f_own;
    double scale = std::max({norm(f_ml), norm(f_si), norm(f_own)});
    REQUIRE(norm(diff) < 1e-12 * scale);
  }

  SECTION("equal charges repel symmetrically") {
    Vec3 f0 = f_si;
    Vec3 f1 = lorentz_force(1, fx.state, fx.shapes, ml_si);
    // Head-on geometry: both partners sit on the x axis with mirrored
    // positions, so the cross forces must mirror too.
    REQUIRE_THAT(f0.x, WithinRel(-f1.x, 1e-12));
    REQUIRE_THAT(f0.y, WithinAbs(0.0, 1e-13));
    REQUIRE_THAT(f0.z, WithinAbs(0.0, 1e-13));
    REQUIRE(f0.x < 0.0);
    REQUIRE(f1.x > 0.0);
  }
}

TEST_CASE("current sources carry minus four pi times the charge velocity") {
  Grid g = make_grid(16.0, 32);
  double e_total = 0.4, radius = 1.75;
  std::vector<ChargeShape> shapes{make_charge_shape(radius, e_total)};

  PhaseSpacePoint phi;
  phi.grid = g;
  ParticleState s;
  s.q = {0.33, -0.71, 0.125};
  s.p = {0.5, -0.25, 0.125};
  phi.particles.push_back(s);
  phi.fields.push_back(FieldPair(g));

  SECTION("a resting charge radiates no current") {
    PhaseSpacePoint rest = phi;
    rest.particles[0].p = Vec3{};
    VectorField cur = current_source(0, rest, shapes);
    REQUIRE(l2_norm(cur) == 0.0);
  }

  SECTION("the cell sum integrates to -4 pi e v") {
    VectorField cur = current_source(0, phi, shapes);
    Vec3 sum{};
    for (std::int64_t i = 0; i < g.size(); ++i)
      sum += Vec3{cur.x[i], cur.y[i], cur.z[i]};
    sum = g.cell_volume() * sum;
    Vec3 expect = -4.0 * std::numbers::pi * e_total * velocity(phi.particles[0]);
    REQUIRE_THAT(sum.x, WithinRel(expect.x, 1e-12));
    REQUIRE_THAT(sum.y, WithinRel(expect.y, 1e-12));
    REQUIRE_THAT(sum.z, WithinRel(expect.z, 1e-12));
  }

  SECTION("the source vanishes identically outside the support") {
    VectorField cur = current_source(0, phi, shapes);
    double reach = radius + std::sqrt(3.0) * g.dx();
    double outside = 0.0;
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz) {
          Vec3 d = g.displacement(g.point(ix, iy, iz), phi.particles[0].q);
          if (norm(d) <= reach) continue;
          Vec3 j = cur.at(g.index(ix, iy, iz));
          outside = std::max(outside, norm(j));
        }
    REQUIRE(outside == 0.0);
  }
}

TEST_CASE("the interaction functional fills every slot but the magnetic one") {
  auto fx = helpers::scattering_pair();
  auto ml = make_coupling(CouplingPreset::ML, 2);
  TangentState tan = apply_J(fx.state, fx.shapes, ml);

  for (std::size_t i = 0; i < 2; ++i) {
    Vec3 v = velocity(fx.state.particles[i]);
    REQUIRE(tan.dq[i].x == v.x);
    REQUIRE(tan.dq[i].y == v.y);
    REQUIRE(tan.dq[i].z == v.z);

    Vec3 f = lorentz_force(i, fx.state, fx.shapes, ml);
    REQUIRE(tan.dp[i].x == f.x);
    REQUIRE(tan.dp[i].y == f.y);
    REQUIRE(tan.dp[i].z == f.z);

    VectorField cur = current_source(i, fx.state, fx.shapes);
    double diff = 0.0;
    for (int c = 0; c < 3; ++c)
      for (std::int64_t k = 0; k < fx.grid.size(); ++k)
        diff = std::max(diff, std::abs(tan.dfields[i].E.comp(c)[k] - cur.comp(c)[k]));
    REQUIRE(diff == 0.0);

    REQUIRE(l2_norm(tan.dfields[i].B) == 0.0);
  }

  SECTION("shape counts must match the state") {
    std::vector<ChargeShape> one{fx.shapes[0]};
    REQUIRE_THROWS_AS(apply_J(fx.state, one, ml), ConfigError);
  }

  SECTION("a resting dressed charge is annihilated by the functional") {
    Grid g = make_grid(16.0, 32);
    std::vector<ChargeShape> shapes{make_charge_shape(1.75, 0.4)};
    PhaseSpacePoint phi;
    phi.grid = g;
    phi.particles.push_back(ParticleState{});
    phi.fields.push_back(coulomb_soliton(phi.particles[0], shapes[0], g));
    WeightSpec w = make_weight(WeightKind::inverse_quadratic, g);
    TangentState still = apply_J(phi, shapes, make_coupling(CouplingPreset::ML, 1));
    REQUIRE(tangent_norm(still, w) < 1e-12);
  }
}

TEST_CASE("the a priori growth estimate dominates the interaction") {
  Grid g = make_grid(16.0, 32);
  WeightSpec w = make_weight(WeightKind::inverse_quadratic, g);
  std::vector<ChargeShape> shapes{make_charge_shape(1.75, 0.4), make_charge_shape(1.75, 0.4)};

  SECTION("zero fields and momenta sit at the trivial end") {
    PhaseSpacePoint phi;
    phi.grid = g;
    phi.particles.assign(2, ParticleState{});
    phi.particles[1].q = {3.0, 0.0, 0.0};
    phi.fields.assign(2, FieldPair(g));
    JBoundReport rep = j_bound_check(phi, shapes, w);
    REQUIRE(rep.lhs == 0.0);
    REQUIRE(rep.pass);
  }

  SECTION("the dressed pair passes with room to spare") {
    auto fx = helpers::scattering_pair();
    JBoundReport rep = j_bound_check(fx.state, fx.shapes, w);
    REQUIRE(rep.pass);
    REQUIRE(rep.slack > 0.0);
    REQUIRE(rep.ratio > 10.0);
  }

  SECTION("random states never breach the estimate") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      PhaseSpacePoint phi = helpers::random_state(g, 2, seed);
      JBoundReport rep = j_bound_check(phi, shapes, w);
      CAPTURE(seed, rep.lhs, rep.rhs);
      REQUIRE(rep.pass);
      REQUIRE(rep.slack > 0.0);
    }
  }

  SECTION("the default coupling is the fully interacting one") {
    auto fx = helpers::scattering_pair();
    JBoundReport a = j_bound_check(fx.state, fx.shapes, w);
    JBoundReport b = j_bound_check(fx.state, fx.shapes, w, make_coupling(CouplingPreset::ML, 2));
    REQUIRE(a.lhs == b.lhs);
    REQUIRE(a.rhs == b.rhs);
  }
}

TEST_CASE("the interaction responds linearly to small perturbations") {
  auto fx = helpers::scattering_pair();
  auto ml = make_coupling(CouplingPreset::ML, 2);
  WeightSpec w = make_weight(WeightKind::inverse_quadratic, fx.grid);
  TangentState base = apply_J(fx.state, fx.shapes, ml);

  TangentState dir = zero_tangent(fx.state);
  Rng rng(42);
  for (std::size_t i = 0; i < 2; ++i) {
    dir.dq[i] = {rng.normal(), rng.normal(), rng.normal()};
    dir.dp[i] = {rng.normal(), rng.normal(), rng.normal()};
    dir.dfields[i].E = helpers::band_limited_field(fx.grid, 1000 + i, 4);
    dir.dfields[i].B = helpers::band_limited_field(fx.grid, 2000 + i, 4);
    dir.dfields[i].invalidate();
  }
  double dir_norm = tangent_norm(dir, w);
  REQUIRE(dir_norm > 0.0);

  auto slope = [&](double delta) {
    PhaseSpacePoint moved = fx.state;
    advance(moved, dir, delta);
    TangentState shifted = apply_J(moved, fx.shapes, ml);
    TangentState diff = zero_tangent(fx.state);
    for (std::size_t i = 0; i < 2; ++i) {
      diff.dq[i] = shifted.dq[i] - base.dq[i];
      diff.dp[i] = shifted.dp[i] - base.dp[i];
      for (int c = 0; c < 3; ++c)
        for (std::int64_t k = 0; k < fx.grid.size(); ++k) {
          diff.dfields[i].E.comp(c)[k] = shifted.dfields[i].E.comp(c)[k] - base.dfields[i].E.comp(c)[k];
          diff.dfields[i].B.comp(c)[k] = shifted.dfields[i].B.comp(c)[k] - base.dfields[i].B.comp(c)[k];
        }
      diff.dfields[i].invalidate();
    }
    return tangent_norm(diff, w) / (delta * dir_norm);
  };

  double s3 = slope(1e-3);
  double s5 = slope(1e-5);
  double s7 = slope(1e-7);
  CAPTURE(s3, s5, s7);
  REQUIRE(s3 > 0.0);
  REQUIRE(helpers::rel_diff(s3, s5) < 0.2);
  REQUIRE(helpers::rel_diff(s5, s7) < 0.2);
}
