#pragma once

// Verification instruments evaluated over state snapshots: Gauss and div B
// constraint residuals, the two energy functionals, the Gronwall growth
// envelope with an explicitly assembled constant, and twin-run Lipschitz
// ratios.  Everything here is read-only; nothing mutates a state.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rigidem/charge_shape.hpp"
#include "rigidem/coupling.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/evolution.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/source.hpp"
#include "rigidem/spectral_deposit.hpp"
#include "rigidem/spectral_ops.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/weights.hpp"

namespace rigidem {

struct ConstraintReport {
  std::vector<double> gauss;        // per charge, ||div E_i - 4 pi rho_net,i(. - q_i)||_L2
  std::vector<double> divB;         // per charge, ||div B_i||_L2
  std::vector<double> gauss_scale;  // per charge, ||4 pi rho_net,i||_L2 for relative checks
  bool background_active = false;   // net charge present, so the k = 0 bin is dropped
};

// Spectral divergence residuals.  The densities enter through the same
// phase-translated spectra the integrator uses, so a residual that starts at
// zero stays at zero instead of picking up deposit noise as charges move.
// On the torus a net charge is neutralized by a uniform background, which
// lives entirely in the k = 0 bin; dropping that bin when a background is
// active subtracts it exactly.
inline ConstraintReport constraint_residuals(const PhaseSpacePoint& phi,
                                             const std::vector<ChargeShape>& shapes) {
  check_consistent(phi);
  if (shapes.size() != phi.charges())
    throw ConfigError("constraint check got " + std::to_string(shapes.size()) + " shapes for " +
                      std::to_string(phi.charges()) + " charges");
  const Grid& g = phi.grid;
  const double vol = g.L * g.L * g.L;
  const int nzk = g.nzk();
  constexpr double four_pi = 4.0 * std::numbers::pi;

  ConstraintReport rep;
  for (const ChargeShape& s : shapes)
    if (s.e_total != 0.0) rep.background_active = true;
  const bool skip_dc = rep.background_active;

  SpectralBuffer rho(static_cast<std::size_t>(g.spec_size()));
  for (std::size_t i = 0; i < phi.charges(); ++i) {
    translated_spectrum(g, *shape_spectrum(g, shapes[i]), phi.particles[i].q, rho);
    const SpectralPair& sp = spectra(phi.fields[i]);
    const std::complex<double>* ex = sp.E.x.data();
    const std::complex<double>* ey = sp.E.y.data();
    const std::complex<double>* ez = sp.E.z.data();
    const std::complex<double>* bx = sp.B.x.data();
    const std::complex<double>* by = sp.B.y.data();
    const std::complex<double>* bz = sp.B.z.data();
    const std::complex<double>* rq = rho.data();

    double gauss_sq = vol * parallel_sum(g.spec_size(), [&](std::int64_t j) {
      if (skip_dc && j == 0) return 0.0;
      std::size_t s = static_cast<std::size_t>(j);
      Vec3 k = detail::spec_wavevector(g, j);
      std::complex<double> kdot = k.x * ex[s] + k.y * ey[s] + k.z * ez[s];
      std::complex<double> div{-kdot.imag(), kdot.real()};
      double hw = g.hermitian_weight(static_cast<int>(j % nzk));
      return hw * std::norm(div - four_pi * rq[s]);
    });
    double scale_sq = vol * parallel_sum(g.spec_size(), [&](std::int64_t j) {
      if (skip_dc && j == 0) return 0.0;
      double hw = g.hermitian_weight(static_cast<int>(j % nzk));
      return hw * std::norm(four_pi * rq[static_cast<std::size_t>(j)]);
    });
    double divb_sq = vol * parallel_sum(g.spec_size(), [&](std::int64_t j) {
      std::size_t s = static_cast<std::size_t>(j);
      Vec3 k = detail::spec_wavevector(g, j);
      std::complex<double> kdot = k.x * bx[s] + k.y * by[s] + k.z * bz[s];
      double hw = g.hermitian_weight(static_cast<int>(j % nzk));
      return hw * std::norm(kdot);
    });
    rep.gauss.push_back(std::sqrt(gauss_sq));
    rep.gauss_scale.push_back(std::sqrt(scale_sq));
    rep.divB.push_back(std::sqrt(divb_sq));
  }
  return rep;
}

enum class EnergyVariant { per_charge, total_field };

struct EnergyReport {
  double kinetic = 0.0;
  double per_charge = 0.0;   // kinetic plus the sum of single-field energies
  double total_field = 0.0;  // kinetic plus the energy of the summed field
};

namespace detail {

inline double field_energy_spectral(const Grid& g, const SpectralField& E,
                                    const SpectralField& B) {
  const int nzk = g.nzk();
  const double vol = g.L * g.L * g.L;
  double sum = parallel_sum(g.spec_size(), [&](std::int64_t j) {
    std::size_t s = static_cast<std::size_t>(j);
    double hw = g.hermitian_weight(static_cast<int>(j % nzk));
    double acc = 0.0;
    acc += std::norm(E.x[s]) + std::norm(E.y[s]) + std::norm(E.z[s]);
    acc += std::norm(B.x[s]) + std::norm(B.y[s]) + std::norm(B.z[s]);
    return hw * acc;
  });
  return vol / (8.0 * std::numbers::pi) * sum;
}

}  // namespace detail

// Both energy functionals in one pass.  The per-charge form sums each field's
// quadratic energy separately; the total-field form squares the summed field,
// which is the combination whose cross terms cancel the Lorentz work when
// every coupling entry is 1.  They coincide for a single charge.
inline EnergyReport energy_report(const PhaseSpacePoint& phi,
                                  const std::vector<ChargeShape>& shapes) {
  check_consistent(phi);
  if (shapes.size() != phi.charges())
    throw ConfigError("energy got " + std::to_string(shapes.size()) + " shapes for " +
                      std::to_string(phi.charges()) + " charges");
  const Grid& g = phi.grid;

  EnergyReport rep;
  for (const ParticleState& s : phi.particles)
    rep.kinetic += s.sigma() * std::sqrt(s.m * s.m + norm2(s.p));

  double per_sum = 0.0;
  SpectralField sumE(g), sumB(g);
  for (std::size_t i = 0; i < phi.charges(); ++i) {
    const SpectralPair& sp = spectra(phi.fields[i]);
    per_sum += detail::field_energy_spectral(g, sp.E, sp.B);
    for (int c = 0; c < 3; ++c) {
      std::complex<double>* se = sumE.comp(c).data();
      std::complex<double>* sb = sumB.comp(c).data();
      const std::complex<double>* fe = sp.E.comp(c).data();
      const std::complex<double>* fb = sp.B.comp(c).data();
      parallel_for(g.spec_size(), [&](std::int64_t j) {
        se[j] += fe[j];
        sb[j] += fb[j];
      });
    }
  }
  rep.per_charge = rep.kinetic + per_sum;
  rep.total_field = rep.kinetic + detail::field_energy_spectral(g, sumE, sumB);
  return rep;
}

inline double energy(const PhaseSpacePoint& phi, const std::vector<ChargeShape>& shapes,
                     EnergyVariant variant) {
  EnergyReport rep = energy_report(phi, shapes);
  return variant == EnergyVariant::per_charge ? rep.per_charge : rep.total_field;
}

// Constants of the growth envelope ||phi_t|| <= e^{gamma t}(1 + C t e^{C t}) ||phi_0||.
struct GrowthConstants {
  double gamma = 0.0;
  double C = 0.0;
  double norm0 = 0.0;
};

// Assembles the envelope constant from the interaction bound: the source
// functional is controlled by C_J per charge, and the weight's polynomial
// envelope of the drifting supports contributes (1 + C_w(||phi0|| + T))^{P_w}
// since charges move slower than light.  Deliberately loose; it only needs to
// majorize.
inline GrowthConstants growth_constants(const PhaseSpacePoint& phi0,
                                        const std::vector<ChargeShape>& shapes,
                                        const WeightSpec& w, const CouplingMatrix& coupling,
                                        double T) {
  GrowthConstants gc;
  gc.gamma = w.gamma;
  gc.norm0 = phase_norm(phi0, w);
  double horizon = std::abs(T);
  double cj = j_bound_constant(phi0, shapes, w, coupling);
  gc.C = std::exp(w.gamma * horizon) * cj * static_cast<double>(phi0.charges()) *
         std::pow(1.0 + w.C_w * (gc.norm0 + horizon), static_cast<double>(w.P_w));
  return gc;
}

// Source-free states obey the bare propagator bound, which is the C = 0 case.
inline GrowthConstants free_field_constants(const PhaseSpacePoint& phi0, const WeightSpec& w) {
  return GrowthConstants{w.gamma, 0.0, phase_norm(phi0, w)};
}

// log of the envelope at time |t|, safe against overflow of C t e^{C t}.
inline double growth_bound_log(double t_abs, const GrowthConstants& gc) {
  double correction = 0.0;
  if (gc.C > 0.0 && t_abs > 0.0) {
    double y = std::log(gc.C * t_abs) + gc.C * t_abs;
    correction = y > 30.0 ? y : std::log1p(std::exp(y));
  }
  return gc.gamma * t_abs + correction + std::log(gc.norm0);
}

struct BoundCheck {
  std::vector<double> lhs;
  std::vector<double> rhs;
  bool pass = false;
  double worst_margin = 0.0;  // min over samples of 1 - lhs/rhs
};

// Checks a recorded norm series against the growth envelope.  Comparison runs
// in log space so an astronomically large envelope still yields a verdict;
// the reported rhs series is capped at the largest finite double.
inline BoundCheck growth_bound_check(const std::vector<double>& times,
                                     const std::vector<double>& norms,
                                     const GrowthConstants& gc) {
  if (times.size() != norms.size())
    throw ConfigError("growth bound check needs matching time and norm series, got " +
                      std::to_string(times.size()) + " times and " +
                      std::to_string(norms.size()) + " norms");
  BoundCheck bc;
  bc.lhs = norms;
  bc.rhs.resize(times.size());
  bc.pass = true;
  bc.worst_margin = 1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double lr = growth_bound_log(std::abs(times[i]), gc);
    bc.rhs[i] = lr > 700.0 ? std::numeric_limits<double>::max() : std::exp(lr);
    double ratio = norms[i] > 0.0 ? std::exp(std::log(norms[i]) - lr) : 0.0;
    if (ratio > 1.0) bc.pass = false;
    bc.worst_margin = std::min(bc.worst_margin, 1.0 - ratio);
  }
  return bc;
}

// Finitely supported phase-space perturbation: one component of one
// particle's position or momentum, swept over a list of magnitudes.
struct DeltaSpec {
  std::size_t particle = 0;
  int component = 0;
  bool on_momentum = true;
  std::vector<double> magnitudes{1e-4, 1e-6, 1e-8};
};

inline PhaseSpacePoint perturbed_state(const PhaseSpacePoint& phi, const DeltaSpec& dspec,
                                       double delta) {
  if (dspec.particle >= phi.charges())
    throw ConfigError("perturbation targets particle " + std::to_string(dspec.particle) +
                      " of " + std::to_string(phi.charges()));
  if (dspec.component < 0 || dspec.component > 2)
    throw ConfigError("perturbation component must be 0, 1, or 2, got " +
                      std::to_string(dspec.component));
  PhaseSpacePoint out = phi;
  ParticleState& part = out.particles[dspec.particle];
  Vec3& target = dspec.on_momentum ? part.p : part.q;
  set_component(target, dspec.component, component(target, dspec.component) + delta);
  return out;
}

namespace detail {

inline PhaseSpacePoint probe_step(const PhaseSpacePoint& s, double dt, const SystemContext& sys,
                                  const EvolveConfig& cfg) {
  if (cfg.scheme == Scheme::strang) return strang_step(s, dt, sys);
  return picard_step(s, dt, sys, cfg).state;
}

}  // namespace detail

// Twin-run Lipschitz ratios.  For each perturbation size the two states are
// stepped in lockstep with a fixed step so distances compare at identical
// times, and sup_t d(t)/d(0) is recorded; no trajectory is stored.  The pass
// criterion is stability of that supremum across the sweep: every entry must
// sit within 1.2x the smallest one.  A zero magnitude contributes identically
// zero distances.
inline BoundCheck lipschitz_probe(const PhaseSpacePoint& phi0, const DeltaSpec& dspec, double T,
                                  const SystemContext& sys, const EvolveConfig& cfg) {
  check_consistent(phi0);
  if (dspec.magnitudes.empty())
    throw ConfigError("perturbation sweep needs at least one magnitude");
  BoundCheck bc;
  for (double delta : dspec.magnitudes) {
    PhaseSpacePoint a = phi0;
    PhaseSpacePoint b = perturbed_state(phi0, dspec, delta);
    double d0 = phase_distance(a, b, sys.weight);
    double sup_ratio = 0.0;
    if (d0 > 0.0) {
      sup_ratio = 1.0;
      double dir = T < 0.0 ? -1.0 : 1.0;
      double remaining = std::abs(T);
      while (remaining > 1e-12 * std::abs(T)) {
        double h = std::min(cfg.dt, remaining);
        a = detail::probe_step(a, dir * h, sys, cfg);
        b = detail::probe_step(b, dir * h, sys, cfg);
        remaining -= h;
        sup_ratio = std::max(sup_ratio, phase_distance(a, b, sys.weight) / d0);
      }
    }
    bc.lhs.push_back(sup_ratio);
  }
  double lo = *std::min_element(bc.lhs.begin(), bc.lhs.end());
  double envelope = 1.2 * lo;
  bc.rhs.assign(bc.lhs.size(), envelope);
  bc.pass = true;
  bc.worst_margin = 1.0;
  for (double v : bc.lhs) {
    if (!std::isfinite(v) || v > envelope) bc.pass = false;
    if (envelope > 0.0) bc.worst_margin = std::min(bc.worst_margin, 1.0 - v / envelope);
  }
  return bc;
}

// One row of the run diagnostics series.
struct DiagnosticsRecord {
  double t = 0.0;
  double H_per = 0.0;
  double H_tot = 0.0;
  std::vector<double> gauss;
  std::vector<double> divB;
  double phase_norm = 0.0;
  double propagator_bound_margin = 0.0;
};

inline DiagnosticsRecord make_record(double t, const PhaseSpacePoint& phi,
                                     const std::vector<ChargeShape>& shapes,
                                     const WeightSpec& w, const GrowthConstants& gc) {
  DiagnosticsRecord rec;
  rec.t = t;
  EnergyReport er = energy_report(phi, shapes);
  rec.H_per = er.per_charge;
  rec.H_tot = er.total_field;
  ConstraintReport cr = constraint_residuals(phi, shapes);
  rec.gauss = std::move(cr.gauss);
  rec.divB = std::move(cr.divB);
  rec.phase_norm = phase_norm(phi, w);
  double lr = growth_bound_log(std::abs(t), gc);
  rec.propagator_bound_margin =
      rec.phase_norm > 0.0 ? 1.0 - std::exp(std::log(rec.phase_norm) - lr) : 1.0;
  return rec;
}

}  // namespace rigidem
