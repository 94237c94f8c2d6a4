#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rigidem/errors.hpp"
#include "rigidem/fft.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/threading.hpp"
#include "rigidem/vec3.hpp"

namespace rigidem {

// Component-major real vector field on a periodic grid.
struct VectorField {
  Grid grid;
  RealBuffer x, y, z;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g),
        x(static_cast<std::size_t>(g.size()), 0.0),
        y(static_cast<std::size_t>(g.size()), 0.0),
        z(static_cast<std::size_t>(g.size()), 0.0) {}

  RealBuffer& comp(int c) { return c == 0 ? x : (c == 1 ? y : z); }
  const RealBuffer& comp(int c) const { return c == 0 ? x : (c == 1 ? y : z); }

  Vec3 at(std::int64_t i) const {
    std::size_t s = static_cast<std::size_t>(i);
    return {x[s], y[s], z[s]};
  }
  void set(std::int64_t i, Vec3 v) {
    std::size_t s = static_cast<std::size_t>(i);
    x[s] = v.x;
    y[s] = v.y;
    z[s] = v.z;
  }
  void accumulate(std::int64_t i, Vec3 v) {
    std::size_t s = static_cast<std::size_t>(i);
    x[s] += v.x;
    y[s] += v.y;
    z[s] += v.z;
  }
};

struct SpectralField {
  Grid grid;
  SpectralBuffer x, y, z;

  SpectralField() = default;
  explicit SpectralField(const Grid& g)
      : grid(g),
        x(static_cast<std::size_t>(g.spec_size())),
        y(static_cast<std::size_t>(g.spec_size())),
        z(static_cast<std::size_t>(g.spec_size())) {}

  SpectralBuffer& comp(int c) { return c == 0 ? x : (c == 1 ? y : z); }
  const SpectralBuffer& comp(int c) const { return c == 0 ? x : (c == 1 ? y : z); }
};

struct SpectralPair {
  SpectralField E, B;
};

// Electric and magnetic field sourced by one charge, plus a lazily built
// spectral image.  Anything that writes to E or B must call invalidate().
struct FieldPair {
  VectorField E, B;
  mutable std::optional<SpectralPair> spectral_cache;

  FieldPair() = default;
  explicit FieldPair(const Grid& g) : E(g), B(g) {}

  FieldPair(const FieldPair& other) : E(other.E), B(other.B) {}
  FieldPair& operator=(const FieldPair& other) {
    E = other.E;
    B = other.B;
    spectral_cache.reset();
    return *this;
  }
  FieldPair(FieldPair&&) = default;
  FieldPair& operator=(FieldPair&&) = default;

  void invalidate() const { spectral_cache.reset(); }
};

inline SpectralField analyze(const VectorField& f) {
  const FftPlan& plan = FftPlan::get(f.grid.n);
  SpectralField out(f.grid);
  for (int c = 0; c < 3; ++c) plan.forward(f.comp(c).data(), out.comp(c).data());
  return out;
}

inline VectorField synthesize(const SpectralField& f) {
  const FftPlan& plan = FftPlan::get(f.grid.n);
  VectorField out(f.grid);
  for (int c = 0; c < 3; ++c) plan.backward(f.comp(c).data(), out.comp(c).data());
  return out;
}

inline const SpectralPair& spectra(const FieldPair& pair) {
  if (!pair.spectral_cache) pair.spectral_cache = SpectralPair{analyze(pair.E), analyze(pair.B)};
  return *pair.spectral_cache;
}

struct ParticleState {
  Vec3 q;
  Vec3 p;
  double m = 1.0;

  double sigma() const { return m < 0.0 ? -1.0 : 1.0; }
};

// Full state of the coupled system: one particle and one field pair per
// charge, all fields sharing a single grid.
struct PhaseSpacePoint {
  Grid grid;
  std::vector<ParticleState> particles;
  std::vector<FieldPair> fields;

  std::size_t charges() const { return particles.size(); }
};

inline void check_consistent(const PhaseSpacePoint& phi) {
  if (phi.particles.size() != phi.fields.size())
    throw ConfigError("phase point has " + std::to_string(phi.particles.size()) +
                      " particles but " + std::to_string(phi.fields.size()) + " field pairs");
  for (const FieldPair& f : phi.fields)
    if (!(f.E.grid == phi.grid) || !(f.B.grid == phi.grid))
      throw ConfigError("phase point mixes fields from different grids");
  for (const ParticleState& s : phi.particles)
    if (s.m == 0.0) throw DomainError("particle mass must be nonzero");
}

// Direction in phase space: per charge a shift of q and p and a field pair.
// The magnetic slot exists for generality; the interaction functional leaves
// it identically zero and evolution code relies on that.
struct TangentState {
  Grid grid;
  std::vector<Vec3> dq;
  std::vector<Vec3> dp;
  std::vector<FieldPair> dfields;
};

inline TangentState zero_tangent(const PhaseSpacePoint& phi) {
  TangentState t;
  t.grid = phi.grid;
  t.dq.assign(phi.charges(), Vec3{});
  t.dp.assign(phi.charges(), Vec3{});
  t.dfields.assign(phi.charges(), FieldPair(phi.grid));
  return t;
}

// phi += s * tangent, applied in place.
inline void advance(PhaseSpacePoint& phi, const TangentState& tan, double s) {
  for (std::size_t i = 0; i < phi.charges(); ++i) {
    phi.particles[i].q += s * tan.dq[i];
    phi.particles[i].p += s * tan.dp[i];
    for (int c = 0; c < 3; ++c) {
      double* e = phi.fields[i].E.comp(c).data();
      double* b = phi.fields[i].B.comp(c).data();
      const double* de = tan.dfields[i].E.comp(c).data();
      const double* db = tan.dfields[i].B.comp(c).data();
      parallel_for(phi.grid.size(), [&](std::int64_t j) {
        e[j] += s * de[j];
        b[j] += s * db[j];
      });
    }
    phi.fields[i].invalidate();
  }
}

}  // namespace rigidem
