#pragma once

// Constraint-satisfying initial states.  The Coulomb soliton inverts the
// Gauss law spectrally against the same translated charge spectrum the
// integrator uses, so a freshly built state has zero Gauss residual up to
// roundoff; on the torus the k=0 mode is excluded, which is the uniform
// neutralizing background.  Plane waves provide exact eigenstates of the
// free propagation, and the longitudinal-noise helper deliberately violates
// the constraints for the transport tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "rigidem/charge_shape.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/fft.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/rng.hpp"
#include "rigidem/spectral_deposit.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/vec3.hpp"

namespace rigidem {

// Longitudinal field of one charge: E_hat = -4 pi i k rho_hat(k; q) / |k|^2,
// E_hat(0) = 0, B = 0.
inline FieldPair coulomb_soliton(const ParticleState& particle, const ChargeShape& shape,
                                 const Grid& g) {
  auto rho0 = shape_spectrum(g, shape);
  SpectralBuffer rho_q = translated_spectrum(g, *rho0, particle.q);
  SpectralPair sp{coulomb_field_spectrum(g, rho_q), SpectralField(g)};
  FieldPair fp;
  fp.E = synthesize(sp.E);
  fp.B = synthesize(sp.B);
  fp.spectral_cache = std::move(sp);
  return fp;
}

// Traveling wave E = A eps cos(k.x), B = khat x E with k = 2 pi m / L.  The
// polarization is projected transverse if needed; *projected reports whether
// that happened.  Mode components must be representable below the Nyquist
// index.
inline FieldPair plane_wave(const Grid& g, std::array<int, 3> mode, Vec3 polarization,
                            double amplitude, bool* projected = nullptr) {
  if (mode[0] == 0 && mode[1] == 0 && mode[2] == 0)
    throw ConfigError("plane wave needs a nonzero mode index");
  for (int c = 0; c < 3; ++c)
    if (std::abs(mode[c]) >= g.n / 2)
      throw ConfigError("plane-wave mode index " + std::to_string(mode[c]) +
                        " is not resolved on an n = " + std::to_string(g.n) + " grid");
  double pn = norm(polarization);
  if (pn == 0.0) throw ConfigError("plane-wave polarization must be nonzero");

  Vec3 k{2.0 * std::numbers::pi * mode[0] / g.L, 2.0 * std::numbers::pi * mode[1] / g.L,
         2.0 * std::numbers::pi * mode[2] / g.L};
  Vec3 khat = (1.0 / norm(k)) * k;
  Vec3 trans = polarization - dot(polarization, khat) * khat;
  bool did_project = norm(trans) < (1.0 - 1e-12) * pn;
  if (projected) *projected = did_project;
  if (norm(trans) < 1e-12 * pn)
    throw ConfigError("plane-wave polarization is parallel to the propagation direction");
  Vec3 eps = (1.0 / norm(trans)) * trans;
  Vec3 bpol = cross(khat, eps);

  FieldPair fp{g};
  double* ex = fp.E.x.data();
  double* ey = fp.E.y.data();
  double* ez = fp.E.z.data();
  double* bx = fp.B.x.data();
  double* by = fp.B.y.data();
  double* bz = fp.B.z.data();
  parallel_for(g.size(), [&](std::int64_t i) {
    int iz = static_cast<int>(i % g.n);
    int iy = static_cast<int>((i / g.n) % g.n);
    int ix = static_cast<int>(i / (static_cast<std::int64_t>(g.n) * g.n));
    Vec3 x = g.point(ix, iy, iz);
    double c = amplitude * std::cos(dot(k, x));
    std::size_t s = static_cast<std::size_t>(i);
    ex[s] = eps.x * c;
    ey[s] = eps.y * c;
    ez[s] = eps.z * c;
    bx[s] = bpol.x * c;
    by[s] = bpol.y * c;
    bz[s] = bpol.z * c;
  });
  return fp;
}

// dst += src, componentwise on both fields.
inline void add_field(FieldPair& dst, const FieldPair& src) {
  for (int c = 0; c < 3; ++c) {
    double* de = dst.E.comp(c).data();
    double* db = dst.B.comp(c).data();
    const double* se = src.E.comp(c).data();
    const double* sb = src.B.comp(c).data();
    parallel_for(dst.E.grid.size(), [&](std::int64_t i) {
      de[i] += se[i];
      db[i] += sb[i];
    });
  }
  dst.invalidate();
}

namespace detail {

// Pure-gradient vector field i k s_hat(k) of a seeded white scalar,
// normalized to unit L2 norm.
inline VectorField unit_gradient_noise(const Grid& g, std::uint64_t seed) {
  RealBuffer scalar(static_cast<std::size_t>(g.size()));
  Rng rng(seed);
  for (double& v : scalar) v = rng.normal();
  SpectralBuffer sh(static_cast<std::size_t>(g.spec_size()));
  FftPlan::get(g.n).forward(scalar.data(), sh.data());
  SpectralField grad(g);
  const std::complex<double>* s = sh.data();
  std::complex<double>* gx = grad.x.data();
  std::complex<double>* gy = grad.y.data();
  std::complex<double>* gz = grad.z.data();
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = spec_wavevector(g, i);
    std::size_t si = static_cast<std::size_t>(i);
    std::complex<double> m = std::complex<double>(0.0, 1.0) * s[si];
    gx[si] = k.x * m;
    gy[si] = k.y * m;
    gz[si] = k.z * m;
  });
  VectorField out = synthesize(grad);
  double n = l2_norm(out);
  if (n == 0.0) throw DomainError("gradient noise collapsed to zero");
  double inv = 1.0 / n;
  for (int c = 0; c < 3; ++c) {
    double* v = out.comp(c).data();
    parallel_for(g.size(), [&](std::int64_t i) { v[i] *= inv; });
  }
  return out;
}

}  // namespace detail

// Adds curl-free noise of the given L2 magnitude to E, and a second
// independent gradient field to B, so both the Gauss and the div B residuals
// start at order `amplitude` and the transport tests can watch them stay put.
inline void add_longitudinal_noise(FieldPair& f, double amplitude, std::uint64_t seed) {
  if (amplitude == 0.0) return;
  const Grid& g = f.E.grid;
  VectorField ge = detail::unit_gradient_noise(g, seed);
  VectorField gb = detail::unit_gradient_noise(g, seed + 0x9e3779b97f4a7c15ull);
  for (int c = 0; c < 3; ++c) {
    double* e = f.E.comp(c).data();
    double* b = f.B.comp(c).data();
    const double* de = ge.comp(c).data();
    const double* db = gb.comp(c).data();
    parallel_for(g.size(), [&](std::int64_t i) {
      e[i] += amplitude * de[i];
      b[i] += amplitude * db[i];
    });
  }
  f.invalidate();
}

}  // namespace rigidem
