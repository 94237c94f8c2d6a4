#pragma once

// Time evolution of the coupled charge-field system.  The primary integrator
// iterates the Duhamel fixed point
//
//   phi_{t_k} = W_{t_k} phi0 + sum_j (trapezoid weights) W_{t_k - s_j} J(phi_{s_j})
//
// on quad_nodes time nodes, with W applied exactly per spectral mode and the
// source J evaluated through the phase-translated charge spectra.  The
// converged node chain is equivalent to consecutive implicit-trapezoid
// substeps in the interaction picture, so the map is symmetric under
// (t, p, B) -> (-t, -p, -B) up to the fixed-point tolerance.  A Strang
// splitting step is provided as an independent cross-check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rigidem/charge_shape.hpp"
#include "rigidem/coupling.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/fft.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/rng.hpp"
#include "rigidem/source.hpp"
#include "rigidem/spectral_deposit.hpp"
#include "rigidem/spectral_ops.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/vec3.hpp"
#include "rigidem/weights.hpp"

namespace rigidem {

enum class Scheme { picard, strang };

inline Scheme parse_scheme(const std::string& s) {
  if (s == "picard") return Scheme::picard;
  if (s == "strang") return Scheme::strang;
  throw ConfigError("unknown scheme '" + s + "' (expected picard or strang)");
}

inline const char* scheme_name(Scheme s) { return s == Scheme::picard ? "picard" : "strang"; }

// Everything the integrator needs to know about the physical system besides
// the state itself.
struct SystemContext {
  std::vector<ChargeShape> shapes;
  CouplingMatrix coupling;
  WeightSpec weight;
};

struct EvolveConfig {
  Scheme scheme = Scheme::picard;
  double dt = 0.01;
  double T = 1.0;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  int quad_nodes = 4;
  bool contraction_guard = true;
  // After convergence, apply the Duhamel map once more and record how far it
  // moves the converged chain.  Costs one extra sweep; off by default.
  bool verify_fixed_point = false;
};

inline void validate_config(const EvolveConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive, got " + std::to_string(cfg.dt));
  if (!(cfg.picard_tol > 0.0 && cfg.picard_tol <= 1e-2))
    throw ConfigError("picard_tol must lie in (0, 1e-2], got " + std::to_string(cfg.picard_tol));
  if (cfg.quad_nodes < 2)
    throw ConfigError("quad_nodes must be at least 2, got " + std::to_string(cfg.quad_nodes));
  if (cfg.picard_max_iter < 1)
    throw ConfigError("picard_max_iter must be at least 1, got " +
                      std::to_string(cfg.picard_max_iter));
}

struct StepReport {
  int iterations = 0;
  std::vector<double> factors;  // successive-difference ratios, one per iteration after the first
  double accepted_dt = 0.0;
  int rejected_steps = 0;
  double final_diff = 0.0;
  double fixed_point_defect = 0.0;  // filled when verify_fixed_point is set
};

// Raised when the contraction guard sees two consecutive non-contracting
// iterations; the driver reacts by halving the step.
struct StepRejection : Error {
  explicit StepRejection(const std::string& detail) : Error("step_rejected", detail) {}
};

struct StepResult {
  PhaseSpacePoint state;
  StepReport report;
};

namespace detail {

// One Duhamel time node: particle coordinates plus each charge's field pair
// in spectral form.  Nodes stay spectral through the whole iteration; real
// space is touched only to evaluate the weighted convergence norm.
struct DuhamelNode {
  std::vector<ParticleState> particles;
  std::vector<SpectralPair> fields;
};

// Source data at one node: translated charge spectra, velocities, forces.
struct NodeSource {
  std::vector<SpectralBuffer> rho;
  std::vector<Vec3> vel;
  std::vector<Vec3> force;
};

inline void eval_node_source(const Grid& g, const DuhamelNode& node,
                             const std::vector<std::shared_ptr<const SpectralBuffer>>& rho0,
                             const CouplingMatrix& coupling, NodeSource& out) {
  std::size_t n = node.particles.size();
  out.rho.resize(n);
  out.vel.resize(n);
  out.force.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    translated_spectrum(g, *rho0[i], node.particles[i].q, out.rho[i]);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 v = velocity(node.particles[i]);
    Vec3 f{};
    for (std::size_t j = 0; j < n; ++j) {
      double eij = coupling.at(i, j);
      if (eij == 0.0) continue;
      FieldMoment m = spectral_moment(g, out.rho[i], node.fields[j]);
      f += eij * (m.electric + cross(v, m.magnetic));
    }
    out.vel[i] = v;
    out.force[i] = f;
  }
}

// dst.E = src.E + coef * rho componentwise, dst.B = src.B, in one pass.
inline void copy_with_current(const Grid& g, SpectralPair& dst, const SpectralPair& src,
                              const SpectralBuffer& rho, Vec3 coef) {
  for (int c = 0; c < 3; ++c) {
    std::complex<double>* de = dst.E.comp(c).data();
    std::complex<double>* db = dst.B.comp(c).data();
    const std::complex<double>* se = src.E.comp(c).data();
    const std::complex<double>* sb = src.B.comp(c).data();
    const std::complex<double>* r = rho.data();
    double cc = component(coef, c);
    parallel_for(g.spec_size(), [&](std::int64_t i) {
      std::size_t s = static_cast<std::size_t>(i);
      de[s] = se[s] + cc * r[s];
      db[s] = sb[s];
    });
  }
}

// Weighted L2 distance squared between two spectral pairs, via synthesis of
// the componentwise difference.
inline double pair_dist_sq(const Grid& g, const SpectralPair& a, const SpectralPair& b,
                           const WeightSpec& w, SpectralBuffer& cs, RealBuffer& rs) {
  cs.resize(static_cast<std::size_t>(g.spec_size()));
  rs.resize(static_cast<std::size_t>(g.size()));
  double sq = 0.0;
  for (int side = 0; side < 2; ++side) {
    for (int c = 0; c < 3; ++c) {
      const SpectralBuffer& pa = side == 0 ? a.E.comp(c) : a.B.comp(c);
      const SpectralBuffer& pb = side == 0 ? b.E.comp(c) : b.B.comp(c);
      std::complex<double>* d = cs.data();
      const std::complex<double>* xa = pa.data();
      const std::complex<double>* xb = pb.data();
      parallel_for(g.spec_size(), [&](std::int64_t i) {
        std::size_t s = static_cast<std::size_t>(i);
        d[s] = xa[s] - xb[s];
      });
      FftPlan::get(g.n).backward(cs.data(), rs.data());
      const double* v = rs.data();
      sq += grid_integral(g, [&](std::int64_t i, Vec3 x) {
        double val = v[i];
        return w(x) * val * val;
      });
    }
  }
  return sq;
}

inline double node_dist(const Grid& g, const DuhamelNode& a, const DuhamelNode& b,
                        const WeightSpec& w, SpectralBuffer& cs, RealBuffer& rs) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    sq += norm2(a.particles[i].q - b.particles[i].q);
    sq += norm2(a.particles[i].p - b.particles[i].p);
    sq += pair_dist_sq(g, a.fields[i], b.fields[i], w, cs, rs);
  }
  return std::sqrt(sq);
}

inline PhaseSpacePoint node_to_phase(const Grid& g, DuhamelNode&& node) {
  PhaseSpacePoint out;
  out.grid = g;
  out.particles = std::move(node.particles);
  out.fields.reserve(node.fields.size());
  for (SpectralPair& sp : node.fields) {
    FieldPair fp;
    fp.E = synthesize(sp.E);
    fp.B = synthesize(sp.B);
    fp.spectral_cache = std::move(sp);
    out.fields.push_back(std::move(fp));
  }
  return out;
}

}  // namespace detail

// One step of the Picard fixed-point integrator.  dt may be negative; the
// config's dt field is ignored here (the caller passes the signed step).
inline StepResult picard_step(const PhaseSpacePoint& phi, double dt, const SystemContext& sys,
                              const EvolveConfig& cfg) {
  check_consistent(phi);
  std::size_t N = phi.charges();
  if (sys.shapes.size() != N)
    throw ConfigError("system has " + std::to_string(sys.shapes.size()) + " shapes for " +
                      std::to_string(N) + " charges");
  if (static_cast<std::size_t>(sys.coupling.N) != N)
    throw ConfigError("coupling matrix is " + std::to_string(sys.coupling.N) + "x" +
                      std::to_string(sys.coupling.N) + " for " + std::to_string(N) + " charges");
  if (!(cfg.picard_tol > 0.0 && cfg.picard_tol <= 1e-2))
    throw ConfigError("picard_tol must lie in (0, 1e-2], got " + std::to_string(cfg.picard_tol));
  if (cfg.quad_nodes < 2)
    throw ConfigError("quad_nodes must be at least 2, got " + std::to_string(cfg.quad_nodes));

  StepResult res;
  res.report.accepted_dt = dt;
  if (N == 0 || dt == 0.0) {
    res.state = propagate_phase(phi, dt);
    res.report.iterations = 1;
    return res;
  }

  const Grid& g = phi.grid;
  int Q = cfg.quad_nodes;
  double h = dt / (Q - 1);

  std::vector<std::shared_ptr<const SpectralBuffer>> rho0(N);
  for (std::size_t i = 0; i < N; ++i) rho0[i] = shape_spectrum(g, sys.shapes[i]);

  double norm0 = phase_norm(phi, sys.weight);

  // Node 0 is pinned to phi for the whole iteration.
  std::vector<detail::DuhamelNode> cur(static_cast<std::size_t>(Q));
  std::vector<detail::DuhamelNode> next(static_cast<std::size_t>(Q));
  cur[0].particles = phi.particles;
  cur[0].fields.reserve(N);
  for (std::size_t i = 0; i < N; ++i) cur[0].fields.push_back(spectra(phi.fields[i]));
  next[0] = cur[0];

  // Free-flow guess: exact field rotation, straight-line particles.
  std::vector<Vec3> v0(N);
  for (std::size_t i = 0; i < N; ++i) v0[i] = velocity(phi.particles[i]);
  for (int k = 1; k < Q; ++k) {
    std::size_t ks = static_cast<std::size_t>(k);
    cur[ks].particles = phi.particles;
    for (std::size_t i = 0; i < N; ++i) cur[ks].particles[i].q += (k * h) * v0[i];
    cur[ks].fields = cur[ks - 1].fields;
    for (std::size_t i = 0; i < N; ++i) rotate_pair(cur[ks].fields[i], g, h);
    next[ks].particles.resize(N);
    next[ks].fields.assign(N, SpectralPair{SpectralField(g), SpectralField(g)});
  }

  std::vector<detail::NodeSource> src(static_cast<std::size_t>(Q));
  SpectralBuffer cscratch;
  RealBuffer rscratch;

  auto sweep = [&](std::vector<detail::DuhamelNode>& from, std::vector<detail::DuhamelNode>& to,
                   bool refresh_node0) {
    if (refresh_node0) detail::eval_node_source(g, from[0], rho0, sys.coupling, src[0]);
    for (int k = 1; k < Q; ++k)
      detail::eval_node_source(g, from[static_cast<std::size_t>(k)], rho0, sys.coupling,
                               src[static_cast<std::size_t>(k)]);
    std::vector<Vec3> sq(N, Vec3{}), sp(N, Vec3{});
    for (int k = 1; k < Q; ++k) {
      std::size_t ks = static_cast<std::size_t>(k);
      const detail::NodeSource& sa = src[ks - 1];
      const detail::NodeSource& sb = src[ks];
      for (std::size_t i = 0; i < N; ++i) {
        sq[i] += (h / 2.0) * (sa.vel[i] + sb.vel[i]);
        sp[i] += (h / 2.0) * (sa.force[i] + sb.force[i]);
        to[ks].particles[i] = phi.particles[i];
        to[ks].particles[i].q += sq[i];
        to[ks].particles[i].p += sp[i];
        Vec3 ca = (-4.0 * std::numbers::pi * h / 2.0) * sa.vel[i];
        Vec3 cb = (-4.0 * std::numbers::pi * h / 2.0) * sb.vel[i];
        detail::copy_with_current(g, to[ks].fields[i], to[ks - 1].fields[i], sa.rho[i], ca);
        rotate_pair(to[ks].fields[i], g, h);
        accumulate_current(to[ks].fields[i].E, sb.rho[i], cb);
      }
    }
    double diff = 0.0;
    for (int k = 1; k < Q; ++k) {
      std::size_t ks = static_cast<std::size_t>(k);
      diff = std::max(diff,
                      detail::node_dist(g, to[ks], from[ks], sys.weight, cscratch, rscratch));
    }
    return diff;
  };

  double prev_diff = 0.0;
  int nondecrease = 0;
  bool converged = false;
  for (int iter = 1; iter <= cfg.picard_max_iter; ++iter) {
    double diff = sweep(cur, next, iter == 1);
    std::swap(cur, next);
    res.report.iterations = iter;
    res.report.final_diff = diff;
    if (iter >= 2) {
      double factor = prev_diff > 0.0 ? diff / prev_diff : 0.0;
      res.report.factors.push_back(factor);
      if (cfg.contraction_guard) {
        if (diff >= prev_diff && diff > cfg.picard_tol * norm0) {
          if (++nondecrease >= 2)
            throw StepRejection("no contraction for two consecutive iterations at dt = " +
                                std::to_string(dt) + " (diff " + std::to_string(diff) +
                                " after " + std::to_string(iter) + " iterations)");
        } else {
          nondecrease = 0;
        }
      }
    }
    prev_diff = diff;
    if (diff <= cfg.picard_tol * norm0) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("fixed-point iteration stalled: diff " + std::to_string(prev_diff) +
                           " above tolerance " + std::to_string(cfg.picard_tol * norm0) +
                           " after " + std::to_string(cfg.picard_max_iter) + " iterations");

  if (cfg.verify_fixed_point) res.report.fixed_point_defect = sweep(cur, next, false);

  res.state = detail::node_to_phase(g, std::move(cur[static_cast<std::size_t>(Q - 1)]));
  return res;
}

// Strang splitting: exact free propagation by dt/2, classical four-stage
// explicit integration of phidot = J(phi) with the curl terms frozen (E
// changes only by the accumulated current, B not at all), then another free
// half step.  The stage fields never materialize: J is linear in E, so the
// stage force corrections reduce to density overlaps.
inline PhaseSpacePoint strang_step(const PhaseSpacePoint& phi, double dt,
                                   const SystemContext& sys) {
  check_consistent(phi);
  std::size_t N = phi.charges();
  if (sys.shapes.size() != N)
    throw ConfigError("system has " + std::to_string(sys.shapes.size()) + " shapes for " +
                      std::to_string(N) + " charges");
  if (N == 0) return propagate_phase(phi, dt);

  const Grid& g = phi.grid;
  std::vector<std::shared_ptr<const SpectralBuffer>> rho0(N);
  for (std::size_t i = 0; i < N; ++i) rho0[i] = shape_spectrum(g, sys.shapes[i]);

  std::vector<SpectralPair> f(N);
  for (std::size_t i = 0; i < N; ++i) {
    f[i] = spectra(phi.fields[i]);
    rotate_pair(f[i], g, dt / 2.0);
  }

  constexpr int S = 4;
  const double stage_a[S] = {0.0, 0.5, 0.5, 1.0};
  const double stage_b[S] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  std::vector<std::vector<SpectralBuffer>> rho(S, std::vector<SpectralBuffer>(N));
  std::vector<std::vector<Vec3>> vel(S, std::vector<Vec3>(N));
  std::vector<std::vector<Vec3>> frc(S, std::vector<Vec3>(N));

  for (int s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < N; ++i) {
      ParticleState ps = phi.particles[i];
      if (s > 0) {
        ps.q += (dt * stage_a[s]) * vel[s - 1][i];
        ps.p += (dt * stage_a[s]) * frc[s - 1][i];
      }
      translated_spectrum(g, *rho0[i], ps.q, rho[s][i]);
      vel[s][i] = velocity(ps);
    }
    for (std::size_t i = 0; i < N; ++i) {
      Vec3 force{};
      for (std::size_t j = 0; j < N; ++j) {
        double eij = sys.coupling.at(i, j);
        if (eij == 0.0) continue;
        FieldMoment m = spectral_moment(g, rho[s][i], f[j]);
        Vec3 fij = m.electric + cross(vel[s][i], m.magnetic);
        if (s > 0) {
          // Electric part of the stage state: E_j + dt a_s (-4 pi v_j rho_j)
          // from the previous stage's current slot.
          double ov = spectral_overlap(g, rho[s][i], rho[s - 1][j]);
          fij += (dt * stage_a[s] * -4.0 * std::numbers::pi * ov) * vel[s - 1][j];
        }
        force += eij * fij;
      }
      frc[s][i] = force;
    }
  }

  PhaseSpacePoint out;
  out.grid = g;
  out.particles = phi.particles;
  for (std::size_t i = 0; i < N; ++i) {
    for (int s = 0; s < S; ++s) {
      out.particles[i].q += (dt * stage_b[s]) * vel[s][i];
      out.particles[i].p += (dt * stage_b[s]) * frc[s][i];
    }
  }
  for (std::size_t j = 0; j < N; ++j)
    for (int s = 0; s < S; ++s)
      accumulate_current(f[j].E, rho[s][j],
                         (-4.0 * std::numbers::pi * dt * stage_b[s]) * vel[s][j]);

  out.fields.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    rotate_pair(f[i], g, dt / 2.0);
    FieldPair fp;
    fp.E = synthesize(f[i].E);
    fp.B = synthesize(f[i].B);
    fp.spectral_cache = std::move(f[i]);
    out.fields.push_back(std::move(fp));
  }
  return out;
}

struct EvolveResult {
  PhaseSpacePoint state;
  double t_reached = 0.0;
  int steps = 0;
  int rejected = 0;
};

using AcceptCallback = std::function<void(const PhaseSpacePoint&, double, const StepReport&)>;

// Largest |T| the periodic box supports: images must stay causally separated,
// with the particle excursion bounded by |T| (speeds are below 1).
inline double horizon_limit(const Grid& g, const std::vector<ChargeShape>& shapes, double dt) {
  double rmax = 0.0;
  for (const ChargeShape& s : shapes) rmax = std::max(rmax, s.R);
  return (g.L / 2.0 - 2.0 * rmax - dt) / 2.0;
}

// Marches phi0 over the signed horizon cfg.T in accepted steps of cfg.dt,
// halving the step on rejection (sticky: the step stays halved).  The
// callback sees every accepted state.
inline EvolveResult evolve(const PhaseSpacePoint& phi0, const SystemContext& sys,
                           const EvolveConfig& cfg, const AcceptCallback& on_accept = {}) {
  validate_config(cfg);
  check_consistent(phi0);
  double span = std::abs(cfg.T);
  if (phi0.charges() > 0) {
    // |T| + dt < L/2 - 2 R_max - |T|, the right side bounding the particle
    // excursion by |T| since speeds stay below 1.
    double safe = horizon_limit(phi0.grid, sys.shapes, cfg.dt);
    if (!(span < safe))
      throw GeometryError("run horizon |T| = " + std::to_string(span) +
                          " is too long for the box: periodic images come into causal contact; "
                          "the largest safe |T| at this dt is " + std::to_string(safe));
  }

  EvolveResult res;
  res.state = phi0;
  double dir = cfg.T < 0.0 ? -1.0 : 1.0;
  double remaining = span;
  double step = cfg.dt;
  double dt_min = cfg.dt / 1024.0;
  int rejected_this_step = 0;

  while (remaining > 1e-12 * std::max(1.0, span)) {
    double d = std::min(step, remaining);
    try {
      StepReport rep;
      if (cfg.scheme == Scheme::picard) {
        StepResult sr = picard_step(res.state, dir * d, sys, cfg);
        res.state = std::move(sr.state);
        rep = std::move(sr.report);
      } else {
        res.state = strang_step(res.state, dir * d, sys);
        rep.accepted_dt = dir * d;
        rep.iterations = 1;
      }
      remaining -= d;
      res.t_reached += dir * d;
      res.steps += 1;
      rep.rejected_steps = rejected_this_step;
      rejected_this_step = 0;
      if (on_accept) on_accept(res.state, res.t_reached, rep);
    } catch (const StepRejection& e) {
      res.rejected += 1;
      rejected_this_step += 1;
      step /= 2.0;
      if (step < dt_min)
        throw ConvergenceError("step size collapsed below dt/1024 at t = " +
                               std::to_string(res.t_reached) + ": " + e.what());
    }
  }
  return res;
}

struct ContractionBudget {
  double value = 0.0;
  double C1 = 0.0;  // linear growth constant of J at this state
  double C2 = 0.0;  // empirical directional Lipschitz quotient of J
  double gamma = 0.0;
};

namespace detail {

inline double tangent_dist(const TangentState& a, const TangentState& b, const WeightSpec& w) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.dq.size(); ++i) {
    sq += norm2(a.dq[i] - b.dq[i]) + norm2(a.dp[i] - b.dp[i]);
    const FieldPair& fa = a.dfields[i];
    const FieldPair& fb = b.dfields[i];
    sq += grid_integral(a.grid, [&](std::int64_t j, Vec3 x) {
      return w(x) * (norm2(fa.E.at(j) - fb.E.at(j)) + norm2(fa.B.at(j) - fb.B.at(j)));
    });
  }
  return std::sqrt(sq);
}

inline TangentState random_tangent(const PhaseSpacePoint& phi, std::uint64_t seed) {
  TangentState t = zero_tangent(phi);
  Rng rng(seed);
  for (std::size_t i = 0; i < phi.charges(); ++i) {
    t.dq[i] = {rng.normal(), rng.normal(), rng.normal()};
    t.dp[i] = {rng.normal(), rng.normal(), rng.normal()};
    for (int c = 0; c < 3; ++c) {
      double* e = t.dfields[i].E.comp(c).data();
      double* b = t.dfields[i].B.comp(c).data();
      for (std::int64_t j = 0; j < phi.grid.size(); ++j) {
        e[j] = rng.normal();
        b[j] = rng.normal();
      }
    }
    t.dfields[i].invalidate();
  }
  return t;
}

}  // namespace detail

// A-priori contraction estimate |dt| e^{gamma |dt|} (2 C1 + C2) for the
// fixed-point map at this state.  Advisory: C1 comes from the proven linear
// bound on J, C2 from directional difference quotients at the state's own
// scale, and the guard in picard_step is the binding check.
inline ContractionBudget contraction_budget(const PhaseSpacePoint& phi, double dt,
                                            const WeightSpec& w,
                                            const std::vector<ChargeShape>& shapes,
                                            const CouplingMatrix& coupling) {
  ContractionBudget out;
  out.gamma = w.gamma;
  if (phi.charges() == 0) return out;

  double cj = j_bound_constant(phi, shapes, w, coupling);
  double shift = 0.0;
  for (const ParticleState& s : phi.particles)
    shift += std::pow(1.0 + w.C_w * norm(s.q), static_cast<double>(w.P_w));
  out.C1 = cj * shift;

  double scale = std::max(1.0, phase_norm(phi, w));
  double eps = 1e-6 * scale;
  TangentState j0 = apply_J(phi, shapes, coupling);
  for (int trial = 0; trial < 3; ++trial) {
    TangentState dir = detail::random_tangent(phi, 0x9a3c5e21u + 977u * trial);
    double dn = tangent_norm(dir, w);
    if (dn == 0.0) continue;
    PhaseSpacePoint shifted = phi;
    advance(shifted, dir, eps / dn);
    TangentState j1 = apply_J(shifted, shapes, coupling);
    out.C2 = std::max(out.C2, detail::tangent_dist(j1, j0, w) / eps);
  }

  out.value = std::abs(dt) * std::exp(w.gamma * std::abs(dt)) * (2.0 * out.C1 + out.C2);
  return out;
}

inline ContractionBudget contraction_budget(const PhaseSpacePoint& phi, double dt,
                                            const WeightSpec& w,
                                            const std::vector<ChargeShape>& shapes) {
  return contraction_budget(phi, dt, w, shapes,
                            make_coupling(CouplingPreset::ML, phi.charges()));
}

}  // namespace rigidem
