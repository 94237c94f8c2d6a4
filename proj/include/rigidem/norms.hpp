#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rigidem/errors.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/weights.hpp"

namespace rigidem {

namespace detail {

template <class F>
double grid_integral(const Grid& g, F&& integrand) {
  double sum = parallel_sum(g.size(), [&](std::int64_t i) {
    int iz = static_cast<int>(i % g.n);
    int iy = static_cast<int>((i / g.n) % g.n);
    int ix = static_cast<int>(i / (std::int64_t(g.n) * g.n));
    return integrand(i, g.point(ix, iy, iz));
  });
  return sum * g.cell_volume();
}

}  // namespace detail

inline double l2_norm(const VectorField& f) {
  double s = detail::grid_integral(f.grid, [&](std::int64_t i, Vec3) { return norm2(f.at(i)); });
  return std::sqrt(s);
}

inline double weighted_l2_norm(const VectorField& f, const WeightSpec& w) {
  if (w.kind == WeightKind::constant) return l2_norm(f);
  double s = detail::grid_integral(f.grid,
                                   [&](std::int64_t i, Vec3 x) { return w(x) * norm2(f.at(i)); });
  return std::sqrt(s);
}

inline double scalar_l2_norm(const Grid& g, const double* v) {
  double s = parallel_sum(g.size(), [&](std::int64_t i) { return v[i] * v[i]; });
  return std::sqrt(s * g.cell_volume());
}

inline double weighted_scalar_l2_norm(const Grid& g, const double* v, const WeightSpec& w) {
  double s = detail::grid_integral(g, [&](std::int64_t i, Vec3 x) { return w(x) * v[i] * v[i]; });
  return std::sqrt(s);
}

// Spectral partial derivative d^alpha applied to one half-complex component.
// Nyquist planes are dropped by deriv_wavenumber, so the result stays the
// transform of a real field.
inline void apply_derivative_multiplier(const Grid& g, const std::array<int, 3>& alpha,
                                        const std::complex<double>* in,
                                        std::complex<double>* out) {
  int order = alpha[0] + alpha[1] + alpha[2];
  std::complex<double> iphase = 1.0;
  for (int r = 0; r < order % 4; ++r) iphase *= std::complex<double>(0.0, 1.0);
  for (int ix = 0; ix < g.n; ++ix) {
    double kx = g.deriv_wavenumber(ix);
    for (int iy = 0; iy < g.n; ++iy) {
      double ky = g.deriv_wavenumber(iy);
      for (int izk = 0; izk < g.nzk(); ++izk) {
        double kz = izk == g.n / 2 ? 0.0 : 2.0 * std::numbers::pi * izk / g.L;
        double mag = 1.0;
        for (int r = 0; r < alpha[0]; ++r) mag *= kx;
        for (int r = 0; r < alpha[1]; ++r) mag *= ky;
        for (int r = 0; r < alpha[2]; ++r) mag *= kz;
        std::int64_t j = g.spec_index(ix, iy, izk);
        out[j] = iphase * mag * in[j];
      }
    }
  }
}

inline std::vector<std::array<int, 3>> multi_indices_of_order(int order) {
  std::vector<std::array<int, 3>> out;
  for (int a = order; a >= 0; --a)
    for (int b = order - a; b >= 0; --b) out.push_back({a, b, order - a - b});
  return out;
}

// Weighted Sobolev seminorm sums: result[k] = norm including all derivative
// orders up to k.  Derivatives are spectral, the weight is applied in real
// space.
inline std::vector<double> weighted_sobolev_norms(const VectorField& f, const WeightSpec& w,
                                                  int max_order) {
  if (max_order < 0 || max_order > 8)
    throw ConfigError("derivative order " + std::to_string(max_order) +
                      " is outside the band-limit safety range [0, 8]");
  const Grid& g = f.grid;
  SpectralField hat = analyze(f);
  SpectralBuffer dspec(static_cast<std::size_t>(g.spec_size()));
  RealBuffer dreal(static_cast<std::size_t>(g.size()));
  const FftPlan& plan = FftPlan::get(g.n);
  std::vector<double> sq(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (int order = 0; order <= max_order; ++order) {
    double contribution = 0.0;
    for (const auto& alpha : multi_indices_of_order(order)) {
      for (int c = 0; c < 3; ++c) {
        apply_derivative_multiplier(g, alpha, hat.comp(c).data(), dspec.data());
        plan.backward(dspec.data(), dreal.data());
        contribution += detail::grid_integral(
            g, [&](std::int64_t i, Vec3 x) { return w(x) * dreal[i] * dreal[i]; });
      }
    }
    sq[static_cast<std::size_t>(order)] = contribution;
  }
  std::vector<double> out(sq.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) {
    acc += sq[k];
    out[k] = std::sqrt(acc);
  }
  return out;
}

struct NormReport {
  double l2 = 0.0;
  double l2w = 0.0;
  std::vector<double> hkw;  // weighted Sobolev norm by derivative order
  double phase_norm = 0.0;
};

inline NormReport field_norm(const VectorField& f, const WeightSpec& w, int max_order = 2) {
  NormReport rep;
  rep.l2 = l2_norm(f);
  rep.l2w = weighted_l2_norm(f, w);
  rep.hkw = weighted_sobolev_norms(f, w, max_order);
  return rep;
}

inline double pair_weighted_sq(const FieldPair& f, const WeightSpec& w) {
  double s = detail::grid_integral(f.E.grid, [&](std::int64_t i, Vec3 x) {
    return w(x) * (norm2(f.E.at(i)) + norm2(f.B.at(i)));
  });
  return s;
}

// Norm on the full phase space: Euclidean on every (q, p) and weighted L2 on
// every field component.
inline double phase_norm(const PhaseSpacePoint& phi, const WeightSpec& w) {
  double sq = 0.0;
  for (const ParticleState& s : phi.particles) sq += norm2(s.q) + norm2(s.p);
  for (const FieldPair& f : phi.fields) sq += pair_weighted_sq(f, w);
  return std::sqrt(sq);
}

inline double tangent_norm(const TangentState& tan, const WeightSpec& w) {
  double sq = 0.0;
  for (std::size_t i = 0; i < tan.dq.size(); ++i) sq += norm2(tan.dq[i]) + norm2(tan.dp[i]);
  for (const FieldPair& f : tan.dfields) sq += pair_weighted_sq(f, w);
  return std::sqrt(sq);
}

// Distance between two phase points in the same norm, computed streaming so
// no difference state is materialized.
inline double phase_distance(const PhaseSpacePoint& a, const PhaseSpacePoint& b,
                             const WeightSpec& w) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.charges(); ++i) {
    sq += norm2(a.particles[i].q - b.particles[i].q);
    sq += norm2(a.particles[i].p - b.particles[i].p);
    const FieldPair& fa = a.fields[i];
    const FieldPair& fb = b.fields[i];
    sq += detail::grid_integral(a.grid, [&](std::int64_t j, Vec3 x) {
      return w(x) * (norm2(fa.E.at(j) - fb.E.at(j)) + norm2(fa.B.at(j) - fb.B.at(j)));
    });
  }
  return std::sqrt(sq);
}

inline NormReport norm_report(const PhaseSpacePoint& phi, const WeightSpec& w, int max_order = 2) {
  NormReport rep;
  rep.hkw.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
  double l2sq = 0.0, l2wsq = 0.0;
  std::vector<double> hk_sq(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (const FieldPair& f : phi.fields) {
    for (const VectorField* v : {&f.E, &f.B}) {
      double a = l2_norm(*v);
      l2sq += a * a;
      double b = weighted_l2_norm(*v, w);
      l2wsq += b * b;
      std::vector<double> hk = weighted_sobolev_norms(*v, w, max_order);
      for (std::size_t k = 0; k < hk.size(); ++k) hk_sq[k] += hk[k] * hk[k];
    }
  }
  rep.l2 = std::sqrt(l2sq);
  rep.l2w = std::sqrt(l2wsq);
  for (std::size_t k = 0; k < hk_sq.size(); ++k) rep.hkw[k] = std::sqrt(hk_sq[k]);
  rep.phase_norm = phase_norm(phi, w);
  return rep;
}

// Morrey-quotient witness: sup over grid points of the summed derivative
// magnitudes up to order k-2, divided by the order-k weighted Sobolev norm.
// Both sides are homogeneous of degree one in the field, so the ratio is
// scale invariant; a zero field yields 0 by convention.
inline double regularity_probe(const VectorField& f, const WeightSpec& w, int k) {
  if (k < 2) throw DomainError("regularity probe needs derivative order k >= 2, got " +
                               std::to_string(k));
  const Grid& g = f.grid;
  double denom = weighted_sobolev_norms(f, w, k).back();
  if (denom == 0.0) return 0.0;

  SpectralField hat = analyze(f);
  SpectralBuffer dspec(static_cast<std::size_t>(g.spec_size()));
  VectorField deriv(g);
  const FftPlan& plan = FftPlan::get(g.n);
  RealBuffer pointwise(static_cast<std::size_t>(g.size()), 0.0);
  for (int order = 0; order <= k - 2; ++order) {
    for (const auto& alpha : multi_indices_of_order(order)) {
      for (int c = 0; c < 3; ++c) {
        apply_derivative_multiplier(g, alpha, hat.comp(c).data(), dspec.data());
        plan.backward(dspec.data(), deriv.comp(c).data());
      }
      parallel_for(g.size(), [&](std::int64_t i) {
        pointwise[static_cast<std::size_t>(i)] += norm(deriv.at(i));
      });
    }
  }
  double sup = 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i)
    if (pointwise[static_cast<std::size_t>(i)] > sup)
      sup = pointwise[static_cast<std::size_t>(i)];
  return sup / denom;
}

}  // namespace rigidem
