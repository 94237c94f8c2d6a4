#pragma once

// Spectral image of a rigid charge density.  A charge at position q is
// represented by exp(-i k.q) rho0_hat(k), the phase-translated spectrum of
// one reference deposit built at the lattice center.  Translating by phase
// keeps the density an exact rigid translate for every q, which real-space
// resampling cannot do (the sampling error depends on the sub-cell offset),
// and that exactness is what makes total charge and the per-charge Gauss
// functional constants of the semidiscrete motion.  The time integrator and
// the constraint diagnostics both work with this image; the real-space
// deposit in charge_shape.hpp remains the definition of record for pointwise
// sampling, support checks, and grid quadrature.

#include <complex>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "rigidem/charge_shape.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/fft.hpp"
#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/spectral_ops.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/vec3.hpp"

namespace rigidem {

namespace detail {

inline std::uint64_t double_bits(double v) {
  std::uint64_t b = 0;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace detail

// Reference spectrum of a charge shape, centered on the lattice.  Nyquist
// planes are zeroed so that every phase translation stays exactly Hermitian
// (the Nyquist modes are their own conjugate partners and admit no complex
// phase), and the k=0 bin is pinned to e_total/L^3 so the represented total
// charge is exact.  Cached per (grid, shape).
inline std::shared_ptr<const SpectralBuffer> shape_spectrum(const Grid& g,
                                                            const ChargeShape& shape) {
  struct Key {
    int n;
    std::uint64_t L, R, e;
    bool operator<(const Key& o) const {
      return std::tie(n, L, R, e) < std::tie(o.n, o.L, o.R, o.e);
    }
  };
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const SpectralBuffer>> cache;

  Key key{g.n, detail::double_bits(g.L), detail::double_bits(shape.R),
          detail::double_bits(shape.e_total)};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  Deposit dep = deposit_shape(g, shape, Vec3{});
  RealBuffer dens(static_cast<std::size_t>(g.size()), 0.0);
  for (std::size_t c = 0; c < dep.cells.size(); ++c)
    dens[static_cast<std::size_t>(dep.cells[c])] = dep.values[c];

  auto spec = std::make_shared<SpectralBuffer>(static_cast<std::size_t>(g.spec_size()));
  FftPlan::get(g.n).forward(dens.data(), spec->data());

  int nq = g.n / 2;
  int nzk = g.nzk();
  std::complex<double>* s = spec->data();
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    int izk = static_cast<int>(i % nzk);
    int iy = static_cast<int>((i / nzk) % g.n);
    int ix = static_cast<int>(i / (static_cast<std::int64_t>(nzk) * g.n));
    if (ix == nq || iy == nq || izk == nq) s[static_cast<std::size_t>(i)] = 0.0;
  });

  if (shape.e_total != 0.0) {
    double target = shape.e_total / (g.L * g.L * g.L);
    double dc = (*spec)[0].real();
    if (!(dc * target > 0.0))
      throw GeometryError("charge spectrum has no resolved mean density (R = " +
                          std::to_string(shape.R) + ", dx = " + std::to_string(g.dx()) + ")");
    double scale = target / dc;
    parallel_for(g.spec_size(),
                 [&](std::int64_t i) { s[static_cast<std::size_t>(i)] *= scale; });
    (*spec)[0] = {target, 0.0};
  }

  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, spec);
  return spec;
}

// out(k) = exp(-i k.q) base(k), using the derivative wavenumbers so the
// (already zero) Nyquist planes stay untouched.  Phases are built from three
// per-axis tables; q is wrapped first to keep the phase arguments small.
inline void translated_spectrum(const Grid& g, const SpectralBuffer& base, Vec3 q,
                                SpectralBuffer& out) {
  out.resize(static_cast<std::size_t>(g.spec_size()));
  Vec3 qw = g.wrap(q);
  std::vector<std::complex<double>> px(static_cast<std::size_t>(g.n));
  std::vector<std::complex<double>> py(static_cast<std::size_t>(g.n));
  std::vector<std::complex<double>> pz(static_cast<std::size_t>(g.nzk()));
  for (int i = 0; i < g.n; ++i) {
    px[static_cast<std::size_t>(i)] = std::polar(1.0, -g.deriv_wavenumber(i) * qw.x);
    py[static_cast<std::size_t>(i)] = std::polar(1.0, -g.deriv_wavenumber(i) * qw.y);
  }
  for (int i = 0; i < g.nzk(); ++i)
    pz[static_cast<std::size_t>(i)] = std::polar(1.0, -g.deriv_wavenumber(i) * qw.z);

  int nzk = g.nzk();
  const std::complex<double>* b = base.data();
  std::complex<double>* o = out.data();
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    int izk = static_cast<int>(i % nzk);
    int iy = static_cast<int>((i / nzk) % g.n);
    int ix = static_cast<int>(i / (static_cast<std::int64_t>(nzk) * g.n));
    std::size_t si = static_cast<std::size_t>(i);
    o[si] = b[si] * (px[static_cast<std::size_t>(ix)] * py[static_cast<std::size_t>(iy)] *
                     pz[static_cast<std::size_t>(izk)]);
  });
}

inline SpectralBuffer translated_spectrum(const Grid& g, const SpectralBuffer& base, Vec3 q) {
  SpectralBuffer out;
  translated_spectrum(g, base, q, out);
  return out;
}

// First moments of a field pair against a density: integral rho(x-q) E(x) dx
// and the same for B, evaluated as L^3 sum_k hermw Re[conj(rho_hat) F_hat].
// The Lorentz force on the charge is electric + v x magnetic.
struct FieldMoment {
  Vec3 electric{};
  Vec3 magnetic{};
};

inline FieldMoment spectral_moment(const Grid& g, const SpectralBuffer& rho,
                                   const SpectralPair& f) {
  double vol = g.L * g.L * g.L;
  int nzk = g.nzk();
  const std::complex<double>* r = rho.data();
  auto component = [&](const SpectralBuffer& comp) {
    const std::complex<double>* c = comp.data();
    return vol * parallel_sum(g.spec_size(), [&](std::int64_t i) {
             std::size_t si = static_cast<std::size_t>(i);
             double w = g.hermitian_weight(static_cast<int>(i % nzk));
             return w * (r[si].real() * c[si].real() + r[si].imag() * c[si].imag());
           });
  };
  FieldMoment m;
  m.electric = {component(f.E.x), component(f.E.y), component(f.E.z)};
  m.magnetic = {component(f.B.x), component(f.B.y), component(f.B.z)};
  return m;
}

// integral a(x) b(x) dx for two densities given spectrally.
inline double spectral_overlap(const Grid& g, const SpectralBuffer& a, const SpectralBuffer& b) {
  double vol = g.L * g.L * g.L;
  int nzk = g.nzk();
  const std::complex<double>* pa = a.data();
  const std::complex<double>* pb = b.data();
  return vol * parallel_sum(g.spec_size(), [&](std::int64_t i) {
           std::size_t si = static_cast<std::size_t>(i);
           double w = g.hermitian_weight(static_cast<int>(i % nzk));
           return w * (pa[si].real() * pb[si].real() + pa[si].imag() * pb[si].imag());
         });
}

// dst += coef (x,y,z components) times rho, the spectral form of adding a
// rigid-density vector source.
inline void accumulate_current(SpectralField& dst, const SpectralBuffer& rho, Vec3 coef) {
  std::complex<double>* dx_ = dst.x.data();
  std::complex<double>* dy_ = dst.y.data();
  std::complex<double>* dz_ = dst.z.data();
  const std::complex<double>* r = rho.data();
  parallel_for(dst.grid.spec_size(), [&](std::int64_t i) {
    std::size_t si = static_cast<std::size_t>(i);
    dx_[si] += coef.x * r[si];
    dy_[si] += coef.y * r[si];
    dz_[si] += coef.z * r[si];
  });
}

// Longitudinal field with div E = 4 pi (rho - mean): E_hat = -4 pi i k
// rho_hat / |k|^2, zero at k=0.  The k=0 exclusion is the uniform
// neutralizing background of the periodic box.
inline SpectralField coulomb_field_spectrum(const Grid& g, const SpectralBuffer& rho) {
  SpectralField e(g);
  const std::complex<double>* r = rho.data();
  std::complex<double>* ex = e.x.data();
  std::complex<double>* ey = e.y.data();
  std::complex<double>* ez = e.z.data();
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = detail::spec_wavevector(g, i);
    double k2 = norm2(k);
    std::size_t si = static_cast<std::size_t>(i);
    if (k2 == 0.0) {
      ex[si] = ey[si] = ez[si] = 0.0;
      return;
    }
    std::complex<double> m = std::complex<double>(0.0, -4.0 * std::numbers::pi) * r[si] / k2;
    ex[si] = k.x * m;
    ey[si] = k.y * m;
    ez[si] = k.z * m;
  });
  return e;
}

}  // namespace rigidem
