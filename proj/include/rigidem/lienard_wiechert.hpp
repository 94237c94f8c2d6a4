#pragma once

// Closed-form retarded and advanced fields of prescribed worldlines, the
// light-cone time solver, and ball-norm scaling probes.  Everything here is
// grid-free: fields are evaluated pointwise from the worldline, which is what
// makes the square-integrability scaling measurable without band-limit
// artifacts.  Units follow the rest of the library (Gaussian, c = 1).

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rigidem/errors.hpp"
#include "rigidem/vec3.hpp"
#include "rigidem/weights.hpp"

namespace rigidem {

enum class WorldlineKind { static_charge, uniform_velocity, circular_orbit };

enum class LightCone { retarded, advanced };

// Prescribed time-like trajectory z(tau), parametrized by coordinate time.
// Circular orbits run in the xy plane around `center`.
struct Worldline {
  WorldlineKind kind = WorldlineKind::static_charge;
  Vec3 center{};
  Vec3 velocity{};
  double r0 = 0.0;
  double omega = 0.0;
  double e = 1.0;

  Vec3 position(double tau) const {
    switch (kind) {
      case WorldlineKind::static_charge:
        return center;
      case WorldlineKind::uniform_velocity:
        return center + tau * velocity;
      case WorldlineKind::circular_orbit:
      default:
        return center + Vec3{r0 * std::cos(omega * tau), r0 * std::sin(omega * tau), 0.0};
    }
  }

  Vec3 beta(double tau) const {
    switch (kind) {
      case WorldlineKind::static_charge:
        return {};
      case WorldlineKind::uniform_velocity:
        return velocity;
      case WorldlineKind::circular_orbit:
      default:
        return {-r0 * omega * std::sin(omega * tau), r0 * omega * std::cos(omega * tau), 0.0};
    }
  }

  Vec3 acceleration(double tau) const {
    if (kind != WorldlineKind::circular_orbit) return {};
    double w2 = omega * omega;
    return {-r0 * w2 * std::cos(omega * tau), -r0 * w2 * std::sin(omega * tau), 0.0};
  }

  double max_speed() const {
    switch (kind) {
      case WorldlineKind::static_charge:
        return 0.0;
      case WorldlineKind::uniform_velocity:
        return norm(velocity);
      case WorldlineKind::circular_orbit:
      default:
        return std::abs(r0 * omega);
    }
  }
};

inline void validate_worldline(const Worldline& wl) {
  double s = wl.max_speed();
  if (!(s < 1.0))
    throw DomainError("worldline is not time-like: sup speed " + std::to_string(s) +
                      " must stay below 1");
  if (wl.kind == WorldlineKind::circular_orbit && !(wl.r0 > 0.0))
    throw DomainError("circular orbit needs a positive radius, got " + std::to_string(wl.r0));
}

inline Worldline static_worldline(Vec3 z0, double e) {
  Worldline wl;
  wl.kind = WorldlineKind::static_charge;
  wl.center = z0;
  wl.e = e;
  return wl;
}

inline Worldline uniform_worldline(Vec3 z0, Vec3 v, double e) {
  Worldline wl;
  wl.kind = WorldlineKind::uniform_velocity;
  wl.center = z0;
  wl.velocity = v;
  wl.e = e;
  validate_worldline(wl);
  return wl;
}

inline Worldline circular_worldline(Vec3 center, double r0, double omega, double e) {
  Worldline wl;
  wl.kind = WorldlineKind::circular_orbit;
  wl.center = center;
  wl.r0 = r0;
  wl.omega = omega;
  wl.e = e;
  validate_worldline(wl);
  return wl;
}

// Solves tau -+ |x - z(tau)| = t for the retarded (upper sign) or advanced
// root.  g(tau) = tau +- |x - z(tau)| - t has slope in [1 - v, 1 + v], so the
// root is unique; bracket expansion, bisection, then Newton polish.
inline double light_cone_time(const Worldline& wl, Vec3 x, double t, LightCone cone) {
  validate_worldline(wl);
  double s = cone == LightCone::retarded ? 1.0 : -1.0;
  auto g = [&](double tau) { return tau + s * norm(x - wl.position(tau)) - t; };

  double r_guess = norm(x - wl.position(t));
  double lo = t - s * r_guess, hi = lo;
  double width = std::max(1.0, r_guess);
  int expand = 0;
  for (; expand < 200; ++expand) {
    lo -= width;
    hi += width;
    if (g(lo) < 0.0 && g(hi) > 0.0) break;
    width *= 2.0;
  }
  if (expand == 200)
    throw ConvergenceError("light-cone bracket not found around t = " + std::to_string(t));

  for (int i = 0; i < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  double tau = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    Vec3 r = x - wl.position(tau);
    double rn = norm(r);
    if (rn == 0.0) break;
    double deriv = 1.0 - s * dot(r, wl.beta(tau)) / rn;
    tau -= (tau + s * rn - t) / deriv;
  }
  return tau;
}

inline double retarded_time(const Worldline& wl, Vec3 x, double t) {
  return light_cone_time(wl, x, t, LightCone::retarded);
}

// Field of a charge in uniform motion, expressed through the present
// position: E = e (1 - v^2) R / (R^2 - |R x v|^2)^{3/2}, B = v x E.
inline void boosted_coulomb(Vec3 r_present, Vec3 v, double e, Vec3& E, Vec3& B) {
  double r2 = norm2(r_present);
  double c2 = norm2(cross(r_present, v));
  double denom = std::pow(r2 - c2, 1.5);
  E = (e * (1.0 - norm2(v)) / denom) * r_present;
  B = cross(v, E);
}

struct LwSample {
  Vec3 E{};
  Vec3 B{};
  bool masked = false;
};

// Velocity plus acceleration field at the light-cone time.  With s = +1 for
// retarded and s = -1 for advanced,
//   E = e [ (n - s b)(1 - b^2) / (kappa^3 r^2) + n x ((n - s b) x a) / (kappa^3 r) ],
//   kappa = 1 - s n.b,  B = s n x E;
// the advanced form follows from the retarded one of the time-reversed
// worldline.  Points within eps_reg of the worldline return a masked sample.
inline LwSample lw_field(const Worldline& wl, Vec3 x, double t, LightCone cone,
                         double eps_reg = 0.0) {
  double tau = light_cone_time(wl, x, t, cone);
  double s = cone == LightCone::retarded ? 1.0 : -1.0;
  Vec3 r = x - wl.position(tau);
  double rn = norm(r);
  LwSample out;
  if (!(rn > eps_reg) || rn == 0.0) {
    out.masked = true;
    return out;
  }
  Vec3 n = (1.0 / rn) * r;
  Vec3 b = wl.beta(tau);
  Vec3 a = wl.acceleration(tau);
  double kappa = 1.0 - s * dot(n, b);
  double k3 = kappa * kappa * kappa;
  Vec3 nb = n - s * b;
  Vec3 evel = ((1.0 - norm2(b)) / (k3 * rn * rn)) * nb;
  Vec3 eacc = (1.0 / (k3 * rn)) * cross(n, cross(nb, a));
  out.E = wl.e * (evel + eacc);
  out.B = s * cross(n, out.E);
  return out;
}

struct ScalingProbeResult {
  std::vector<double> radii;
  std::vector<double> l2_norms;
  std::vector<double> l2w_norms;
  double l2_exponent = 0.0;   // growth exponent of the squared plain norm
  double l2w_exponent = 0.0;  // same for the weighted norm
};

// RMS of |E| over the sphere of radius r at observation time t.
inline double sphere_rms_field(const Worldline& wl, double t, double r, LightCone cone);

// Log-log slope of r * rms|E(r)| over [r_lo, r_hi]; 1/r radiation decay
// shows up as slope 0.
inline double radial_decay_slope(const Worldline& wl, double t, double r_lo, double r_hi,
                                 int samples, LightCone cone);

namespace detail {

inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      double dp = n * (x * p0 - p1) / (x * x - 1.0);
      double step = p0 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
    }
    double dp = n * (x * p0 - p1) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Least-squares slope of log y against log x over entries with positive y.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  double denom = m * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (m * sxy - sx * sy) / denom;
}

}  // namespace detail

inline double sphere_rms_field(const Worldline& wl, double t, double r, LightCone cone) {
  constexpr int kTheta = 24;
  constexpr int kPhi = 48;
  std::vector<double> ct, cw;
  detail::gauss_legendre(kTheta, ct, cw);
  double acc = 0.0, wsum = 0.0;
  for (int it = 0; it < kTheta; ++it) {
    double cth = ct[static_cast<std::size_t>(it)];
    double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
    for (int ip = 0; ip < kPhi; ++ip) {
      double ph = 2.0 * std::numbers::pi * ip / kPhi;
      Vec3 x{r * sth * std::cos(ph), r * sth * std::sin(ph), r * cth};
      LwSample s = lw_field(wl, x, t, cone);
      if (s.masked) continue;
      acc += cw[static_cast<std::size_t>(it)] * norm2(s.E);
      wsum += cw[static_cast<std::size_t>(it)];
    }
  }
  return wsum > 0.0 ? std::sqrt(acc / wsum) : 0.0;
}

inline double radial_decay_slope(const Worldline& wl, double t, double r_lo, double r_hi,
                                 int samples, LightCone cone) {
  if (samples < 2 || !(r_lo > 0.0) || !(r_hi > r_lo))
    throw ConfigError("decay slope needs at least two samples on a positive radius range");
  std::vector<double> r(static_cast<std::size_t>(samples)), v(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    double ri = r_lo * std::pow(r_hi / r_lo, double(i) / (samples - 1));
    r[static_cast<std::size_t>(i)] = ri;
    v[static_cast<std::size_t>(i)] = ri * sphere_rms_field(wl, t, ri, cone);
  }
  return detail::loglog_slope(r, v);
}

// Cumulative ball norms of a pointwise field over shells between consecutive
// radii: norms[i] covers radii[0] <= |x| <= radii[i], so norms[0] = 0 and the
// first radius acts as the inner cutoff that excises the worldline core.
// Quadrature: Gauss-Legendre in cos(theta) and radius, uniform in phi; the
// growth exponents are log-log slopes of the squared norms.
inline ScalingProbeResult norm_scaling_probe(const std::function<Vec3(Vec3)>& field,
                                             const std::vector<double>& radii,
                                             const WeightSpec& w) {
  if (radii.size() < 2) throw ConfigError("norm scaling probe needs at least two radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > 0.0 && radii[i] < radii[i + 1]))
      throw ConfigError("probe radii must be positive and strictly increasing");

  constexpr int kTheta = 24;
  constexpr int kPhi = 48;
  constexpr int kRadialPerShell = 32;
  std::vector<double> ct, cw, rt, rw;
  detail::gauss_legendre(kTheta, ct, cw);
  detail::gauss_legendre(kRadialPerShell, rt, rw);

  ScalingProbeResult res;
  res.radii = radii;
  res.l2_norms.assign(radii.size(), 0.0);
  res.l2w_norms.assign(radii.size(), 0.0);

  double plain_sq = 0.0, weighted_sq = 0.0;
  for (std::size_t shell = 0; shell + 1 < radii.size(); ++shell) {
    double a = radii[shell], b = radii[shell + 1];
    for (int ir = 0; ir < kRadialPerShell; ++ir) {
      double r = 0.5 * (a + b) + 0.5 * (b - a) * rt[static_cast<std::size_t>(ir)];
      double wr = 0.5 * (b - a) * rw[static_cast<std::size_t>(ir)] * r * r;
      for (int it = 0; it < kTheta; ++it) {
        double cth = ct[static_cast<std::size_t>(it)];
        double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
        double wt = cw[static_cast<std::size_t>(it)];
        for (int ip = 0; ip < kPhi; ++ip) {
          double phi = 2.0 * std::numbers::pi * ip / kPhi;
          Vec3 x{r * sth * std::cos(phi), r * sth * std::sin(phi), r * cth};
          double f2 = norm2(field(x));
          double wq = wr * wt * (2.0 * std::numbers::pi / kPhi);
          plain_sq += wq * f2;
          weighted_sq += wq * w(x) * f2;
        }
      }
    }
    res.l2_norms[shell + 1] = std::sqrt(plain_sq);
    res.l2w_norms[shell + 1] = std::sqrt(weighted_sq);
  }

  std::vector<double> sq(radii.size()), wsq(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    sq[i] = res.l2_norms[i] * res.l2_norms[i];
    wsq[i] = res.l2w_norms[i] * res.l2w_norms[i];
  }
  res.l2_exponent = detail::loglog_slope(radii, sq);
  res.l2w_exponent = detail::loglog_slope(radii, wsq);
  return res;
}

}  // namespace rigidem
