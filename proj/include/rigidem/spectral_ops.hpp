#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <deque>
#include <map>
#include <memory>
#include <mutex>

#include "rigidem/fields.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/threading.hpp"

namespace rigidem {

namespace detail {

struct CVec {
  std::complex<double> x, y, z;
};

inline CVec operator+(CVec a, CVec b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline CVec operator-(CVec a, CVec b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline CVec operator*(std::complex<double> s, CVec a) { return {s * a.x, s * a.y, s * a.z}; }
inline CVec scale(Vec3 k, std::complex<double> s) { return {k.x * s, k.y * s, k.z * s}; }
inline std::complex<double> dot(Vec3 k, CVec a) { return k.x * a.x + k.y * a.y + k.z * a.z; }
inline CVec cross(Vec3 k, CVec a) {
  return {k.y * a.z - k.z * a.y, k.z * a.x - k.x * a.z, k.x * a.y - k.y * a.x};
}

// Decode a flat half-complex index and return the derivative wavevector.
// Nyquist planes carry a zero so odd-order multipliers keep Hermitian
// symmetry; the propagator uses the same vector, making it the exact
// exponential of the discrete curl generator.
inline Vec3 spec_wavevector(const Grid& g, std::int64_t i) {
  int nzk = g.nzk();
  int izk = static_cast<int>(i % nzk);
  int iy = static_cast<int>((i / nzk) % g.n);
  int ix = static_cast<int>(i / (std::int64_t(nzk) * g.n));
  double kz = izk == g.n / 2 ? 0.0 : 2.0 * std::numbers::pi * izk / g.L;
  return {g.deriv_wavenumber(ix), g.deriv_wavenumber(iy), kz};
}

}  // namespace detail

// cos(w t) and sin(w t)/w per mode for one grid and time, shared and reused
// across evolution steps (every step touches the same handful of times).
struct RotationTable {
  std::vector<double> c;
  std::vector<double> s_over_w;
};

inline std::shared_ptr<const RotationTable> rotation_table(const Grid& g, double t) {
  struct Key {
    int n;
    std::uint64_t lbits, tbits;
    bool operator<(const Key& o) const {
      if (n != o.n) return n < o.n;
      if (lbits != o.lbits) return lbits < o.lbits;
      return tbits < o.tbits;
    }
  };
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const RotationTable>> cache;
  static std::deque<Key> order;

  Key key{g.n, 0, 0};
  std::memcpy(&key.lbits, &g.L, sizeof key.lbits);
  std::memcpy(&key.tbits, &t, sizeof key.tbits);
  {
    std::lock_guard<std::mutex> lk(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto table = std::make_shared<RotationTable>();
  table->c.resize(static_cast<std::size_t>(g.spec_size()));
  table->s_over_w.resize(static_cast<std::size_t>(g.spec_size()));
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = detail::spec_wavevector(g, i);
    double w = norm(k);
    if (w == 0.0) {
      table->c[static_cast<std::size_t>(i)] = 1.0;
      table->s_over_w[static_cast<std::size_t>(i)] = t;
      return;
    }
    table->c[static_cast<std::size_t>(i)] = std::cos(w * t);
    table->s_over_w[static_cast<std::size_t>(i)] = std::sin(w * t) / w;
  });
  std::lock_guard<std::mutex> lk(mutex);
  cache.emplace(key, table);
  order.push_back(key);
  while (order.size() > 24) {
    cache.erase(order.front());
    order.pop_front();
  }
  return table;
}

// Exact free-field flow in place on the spectra: for every mode the
// transverse parts of (E, B) rotate with angular frequency |k| under
// dE/dt = ik x B, dB/dt = -ik x E; longitudinal parts and k = 0 are static.
inline void rotate_pair(SpectralPair& pair, const Grid& g, double t) {
  if (t == 0.0) return;
  std::shared_ptr<const RotationTable> table = rotation_table(g, t);
  std::complex<double>* ex = pair.E.x.data();
  std::complex<double>* ey = pair.E.y.data();
  std::complex<double>* ez = pair.E.z.data();
  std::complex<double>* bx = pair.B.x.data();
  std::complex<double>* by = pair.B.y.data();
  std::complex<double>* bz = pair.B.z.data();
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = detail::spec_wavevector(g, i);
    double w2 = norm2(k);
    if (w2 == 0.0) return;
    std::size_t s = static_cast<std::size_t>(i);
    detail::CVec e{ex[s], ey[s], ez[s]};
    detail::CVec b{bx[s], by[s], bz[s]};
    detail::CVec eL = detail::scale(k, detail::dot(k, e) / w2);
    detail::CVec bL = detail::scale(k, detail::dot(k, b) / w2);
    double c = table->c[s];
    std::complex<double> is(0.0, table->s_over_w[s]);
    detail::CVec enew = eL + c * (e - eL) + is * detail::cross(k, b);
    detail::CVec bnew = bL + c * (b - bL) - is * detail::cross(k, e);
    ex[s] = enew.x;
    ey[s] = enew.y;
    ez[s] = enew.z;
    bx[s] = bnew.x;
    by[s] = bnew.y;
    bz[s] = bnew.z;
  });
}

inline FieldPair free_propagate(const FieldPair& pair, double t) {
  SpectralPair hat = spectra(pair);
  rotate_pair(hat, pair.E.grid, t);
  FieldPair out;
  out.E = synthesize(hat.E);
  out.B = synthesize(hat.B);
  out.spectral_cache = std::move(hat);
  return out;
}

// W_t on the whole phase point: identity on particles, free flow per field.
inline PhaseSpacePoint propagate_phase(const PhaseSpacePoint& phi, double t) {
  PhaseSpacePoint out;
  out.grid = phi.grid;
  out.particles = phi.particles;
  out.fields.reserve(phi.fields.size());
  for (const FieldPair& f : phi.fields) out.fields.push_back(free_propagate(f, t));
  return out;
}

inline SpectralField curl_spectrum(const SpectralField& f) {
  const Grid& g = f.grid;
  SpectralField out(g);
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = detail::spec_wavevector(g, i);
    std::size_t s = static_cast<std::size_t>(i);
    detail::CVec v{f.x[s], f.y[s], f.z[s]};
    detail::CVec c = std::complex<double>(0.0, 1.0) * detail::cross(k, v);
    out.x[s] = c.x;
    out.y[s] = c.y;
    out.z[s] = c.z;
  });
  return out;
}

inline VectorField spectral_curl(const VectorField& f) {
  return synthesize(curl_spectrum(analyze(f)));
}

inline VectorField spectral_curl(const VectorField& f, const Grid& g) {
  if (!(f.grid == g)) throw ConfigError("curl requested on a mismatched grid");
  return spectral_curl(f);
}

// Divergence as a real scalar field.
inline RealBuffer spectral_divergence(const VectorField& f) {
  const Grid& g = f.grid;
  SpectralField hat = analyze(f);
  SpectralBuffer div(static_cast<std::size_t>(g.spec_size()));
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = detail::spec_wavevector(g, i);
    std::size_t s = static_cast<std::size_t>(i);
    div[s] = std::complex<double>(0.0, 1.0) *
             (k.x * hat.x[s] + k.y * hat.y[s] + k.z * hat.z[s]);
  });
  RealBuffer out(static_cast<std::size_t>(g.size()));
  FftPlan::get(g.n).backward(div.data(), out.data());
  return out;
}

inline RealBuffer spectral_divergence(const VectorField& f, const Grid& g) {
  if (!(f.grid == g)) throw ConfigError("divergence requested on a mismatched grid");
  return spectral_divergence(f);
}

// Remove the longitudinal part mode by mode.  Returns the weighted L2 size of
// what was removed so callers can warn on non-transverse input.
inline double transverse_project(SpectralField& f) {
  const Grid& g = f.grid;
  std::vector<double> removed(static_cast<std::size_t>(g.spec_size()), 0.0);
  parallel_for(g.spec_size(), [&](std::int64_t i) {
    Vec3 k = detail::spec_wavevector(g, i);
    double w2 = norm2(k);
    if (w2 == 0.0) return;
    std::size_t s = static_cast<std::size_t>(i);
    detail::CVec v{f.x[s], f.y[s], f.z[s]};
    detail::CVec vL = detail::scale(k, detail::dot(k, v) / w2);
    f.x[s] = v.x - vL.x;
    f.y[s] = v.y - vL.y;
    f.z[s] = v.z - vL.z;
    removed[s] = g.hermitian_weight(static_cast<int>(i % g.nzk())) *
                 (std::norm(vL.x) + std::norm(vL.y) + std::norm(vL.z));
  });
  double sq = pairwise_sum(removed.data(), g.spec_size());
  return std::sqrt(sq * g.L * g.L * g.L);
}

}  // namespace rigidem
