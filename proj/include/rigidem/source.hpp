#pragma once

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rigidem/charge_shape.hpp"
#include "rigidem/coupling.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/weights.hpp"

namespace rigidem {

// Relativistic velocity map v(p) = sigma p / sqrt(m^2 + p^2), always inside
// the open unit ball.  For |p|/|m| beyond ~1e8 the quotient rounds to exactly
// one in double precision, so the result is nudged back inside; downstream
// code divides by 1 - |v|^2 and must never see |v| = 1.
inline Vec3 velocity(Vec3 p, double m, double sigma) {
  if (m == 0.0) throw DomainError("velocity map needs a nonzero mass");
  Vec3 v = (sigma / std::sqrt(m * m + norm2(p))) * p;
  double v2 = norm2(v);
  if (v2 >= 1.0) v = std::sqrt((1.0 - 4.0 * DBL_EPSILON) / v2) * v;
  return v;
}

inline Vec3 velocity(const ParticleState& s) { return velocity(s.p, s.m, s.sigma()); }

// Smeared Lorentz force on charge i: quadrature of
//   sum_j e_ij rho_i(x - q_i) [E_j(x) + v(p_i) x B_j(x)]
// over the grid cells inside the support.
inline Vec3 lorentz_force(std::size_t i, const PhaseSpacePoint& phi,
                          const std::vector<ChargeShape>& shapes, const CouplingMatrix& coupling) {
  const ParticleState& part = phi.particles[i];
  Vec3 v = velocity(part);
  Deposit dep = deposit_shape(phi.grid, shapes[i], part.q);
  Vec3 force{};
  for (std::size_t c = 0; c < dep.cells.size(); ++c) {
    std::int64_t cell = dep.cells[c];
    Vec3 combined{};
    for (std::size_t j = 0; j < phi.charges(); ++j) {
      double eij = coupling.at(i, j);
      if (eij == 0.0) continue;
      combined += eij * (phi.fields[j].E.at(cell) + cross(v, phi.fields[j].B.at(cell)));
    }
    force += dep.values[c] * combined;
  }
  return dep.cell_volume * force;
}

// Current source feeding charge i's own electric field: -4 pi v(p_i)
// rho_i(x - q_i), returned as a full grid field (zero outside the support).
inline VectorField current_source(std::size_t i, const PhaseSpacePoint& phi,
                                  const std::vector<ChargeShape>& shapes) {
  const ParticleState& part = phi.particles[i];
  Vec3 v = velocity(part);
  Deposit dep = deposit_shape(phi.grid, shapes[i], part.q);
  VectorField out(phi.grid);
  Vec3 scale = -4.0 * std::numbers::pi * v;
  for (std::size_t c = 0; c < dep.cells.size(); ++c)
    out.accumulate(dep.cells[c], dep.values[c] * scale);
  return out;
}

// The full interaction functional: velocities into the position slots, smeared
// Lorentz forces into the momentum slots, current sources into the electric
// slots, and an identically zero magnetic slot.
inline TangentState apply_J(const PhaseSpacePoint& phi, const std::vector<ChargeShape>& shapes,
                            const CouplingMatrix& coupling) {
  check_consistent(phi);
  if (shapes.size() != phi.charges())
    throw ConfigError("state has " + std::to_string(phi.charges()) + " charges but " +
                      std::to_string(shapes.size()) + " shapes");
  TangentState tan = zero_tangent(phi);
  for (std::size_t i = 0; i < phi.charges(); ++i) {
    tan.dq[i] = velocity(phi.particles[i]);
    tan.dp[i] = lorentz_force(i, phi, shapes, coupling);
    tan.dfields[i].E = current_source(i, phi, shapes);
    tan.dfields[i].invalidate();
  }
  return tan;
}

struct JBoundReport {
  double lhs = 0.0;     // ||J(phi)|| in the phase norm
  double rhs = 0.0;     // C_J sum_i (1+C_w|q_i|)^{P_w} ||phi||
  double C_J = 0.0;
  double slack = 0.0;   // rhs - lhs
  double ratio = 0.0;   // rhs / lhs, infinite when lhs = 0
  bool pass = false;    // lhs <= rhs
};

// Norm constants of the shapes against the weight, assembled into the linear
// growth estimate for J.  K_vel = sum_i 2/|m_i| dominates both the velocity
// slots (|v| <= |p|/|m|) and the current prefactor; the force term carries
// the duality factor ||rho/sqrt(w)||.
inline double j_bound_constant(const PhaseSpacePoint& phi, const std::vector<ChargeShape>& shapes,
                               const WeightSpec& w, const CouplingMatrix& coupling) {
  const Grid& g = phi.grid;
  std::size_t N = phi.charges();
  double k_vel = 0.0;
  for (const ParticleState& s : phi.particles) k_vel += 2.0 / std::abs(s.m);
  double e_max = coupling.max_abs();
  double rho_dual_max = 0.0;  // max_i ||rho_i / sqrt(w)||_{L2}
  double rho_weighted_sum = 0.0;  // sum_i ||rho_i||_{L2_w}
  for (std::size_t i = 0; i < N; ++i) {
    Deposit dep = deposit_shape(g, shapes[i], Vec3{});
    double dual_sq = 0.0, weighted_sq = 0.0;
    for (std::size_t c = 0; c < dep.cells.size(); ++c) {
      std::int64_t cell = dep.cells[c];
      int iz = static_cast<int>(cell % g.n);
      int iy = static_cast<int>((cell / g.n) % g.n);
      int ix = static_cast<int>(cell / (std::int64_t(g.n) * g.n));
      double wx = w(g.point(ix, iy, iz));
      double r2 = dep.values[c] * dep.values[c];
      dual_sq += r2 / wx;
      weighted_sq += r2 * wx;
    }
    dual_sq *= dep.cell_volume;
    weighted_sq *= dep.cell_volume;
    if (std::sqrt(dual_sq) > rho_dual_max) rho_dual_max = std::sqrt(dual_sq);
    rho_weighted_sum += std::sqrt(weighted_sq);
  }
  double n = static_cast<double>(N);
  return n * k_vel + 2.0 * n * e_max * rho_dual_max +
         4.0 * std::numbers::pi * k_vel * rho_weighted_sum;
}

inline JBoundReport j_bound_check(const PhaseSpacePoint& phi,
                                  const std::vector<ChargeShape>& shapes, const WeightSpec& w,
                                  const CouplingMatrix& coupling) {
  JBoundReport rep;
  rep.C_J = j_bound_constant(phi, shapes, w, coupling);
  TangentState j = apply_J(phi, shapes, coupling);
  rep.lhs = tangent_norm(j, w);
  double shift_sum = 0.0;
  for (const ParticleState& s : phi.particles)
    shift_sum += std::pow(1.0 + w.C_w * norm(s.q), w.P_w);
  rep.rhs = rep.C_J * shift_sum * phase_norm(phi, w);
  rep.slack = rep.rhs - rep.lhs;
  rep.ratio = rep.lhs > 0.0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

inline JBoundReport j_bound_check(const PhaseSpacePoint& phi,
                                  const std::vector<ChargeShape>& shapes, const WeightSpec& w) {
  return j_bound_check(phi, shapes, w, make_coupling(CouplingPreset::ML, phi.charges()));
}

}  // namespace rigidem
