#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "rigidem/errors.hpp"
#include "rigidem/grid.hpp"
#include "rigidem/vec3.hpp"

namespace rigidem {

enum class WeightKind { constant, inverse_quadratic, tabulated };

inline WeightKind parse_weight_kind(const std::string& s) {
  if (s == "constant") return WeightKind::constant;
  if (s == "inverse_quadratic") return WeightKind::inverse_quadratic;
  if (s == "tabulated") return WeightKind::tabulated;
  throw ConfigError("unknown weight kind '" + s + "'");
}

inline const char* weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::constant: return "constant";
    case WeightKind::inverse_quadratic: return "inverse_quadratic";
    default: return "tabulated";
  }
}

struct WeightTable {
  Grid grid;
  std::vector<double> values;  // grid layout, all strictly positive
};

// One sup bound sup_x |d^alpha sqrt(w)| / sqrt(w) for a multi-index alpha.
struct DerivConstant {
  std::array<int, 3> alpha{0, 0, 0};
  double c = 0.0;
};

// A polynomially tame weight function together with the constants that place
// it in the admissible class: w(x) <= (1 + C_w ||y||)^{P_w} w(x+y) and
// |d^alpha sqrt(w)| <= c_alpha sqrt(w) up to second derivatives.  gamma is
// the Euclidean length of the first-order constant vector and controls the
// growth rate exp(gamma |t|) of the weighted norm under free propagation.
struct WeightSpec {
  WeightKind kind = WeightKind::constant;
  double C_w = 0.0;
  int P_w = 0;
  double gamma = 0.0;
  std::vector<DerivConstant> deriv_constants;
  std::shared_ptr<const WeightTable> table;

  double operator()(Vec3 x) const {
    switch (kind) {
      case WeightKind::constant: return 1.0;
      case WeightKind::inverse_quadratic: return 1.0 / (1.0 + norm2(x));
      default: return table_eval(x);
    }
  }

  double table_eval(Vec3 x) const {
    const Grid& g = table->grid;
    double fx = (g.wrap(x.x) + g.L / 2) / g.dx();
    double fy = (g.wrap(x.y) + g.L / 2) / g.dx();
    double fz = (g.wrap(x.z) + g.L / 2) / g.dx();
    int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy)),
        iz = static_cast<int>(std::floor(fz));
    double tx = fx - ix, ty = fy - iy, tz = fz - iz;
    auto v = [&](int a, int b, int c) {
      return table->values[static_cast<std::size_t>(g.index((a + g.n) % g.n, (b + g.n) % g.n,
                                                            (c + g.n) % g.n))];
    };
    double c00 = v(ix, iy, iz) * (1 - tx) + v(ix + 1, iy, iz) * tx;
    double c10 = v(ix, iy + 1, iz) * (1 - tx) + v(ix + 1, iy + 1, iz) * tx;
    double c01 = v(ix, iy, iz + 1) * (1 - tx) + v(ix + 1, iy, iz + 1) * tx;
    double c11 = v(ix, iy + 1, iz + 1) * (1 - tx) + v(ix + 1, iy + 1, iz + 1) * tx;
    double c0 = c00 * (1 - ty) + c10 * ty;
    double c1 = c01 * (1 - ty) + c11 * ty;
    return c0 * (1 - tz) + c1 * tz;
  }
};

namespace detail {

// Ratios |d^alpha sqrt(w)| / sqrt(w) for the inverse quadratic weight
// w = (1 + r^2)^{-1}, evaluated in closed form.
inline double inv_quad_ratio(const std::array<int, 3>& alpha, Vec3 x) {
  double r2 = norm2(x);
  double u = 1.0 + r2;
  int order = alpha[0] + alpha[1] + alpha[2];
  if (order == 0) return 1.0;
  if (order == 1) {
    int i = alpha[0] ? 0 : (alpha[1] ? 1 : 2);
    return std::abs(component(x, i)) / u;
  }
  // order == 2
  int i = -1, j = -1;
  for (int a = 0; a < 3; ++a) {
    for (int rep = 0; rep < alpha[static_cast<std::size_t>(a)]; ++rep) {
      if (i < 0) i = a;
      else j = a;
    }
  }
  double xi = component(x, i), xj = component(x, j);
  if (i == j) return std::abs(3.0 * xi * xi / (u * u) - 1.0 / u);
  return 3.0 * std::abs(xi * xj) / (u * u);
}

inline std::vector<std::array<int, 3>> multi_indices_up_to_two() {
  return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0}, {0, 2, 0},
          {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
}

// Sup of |d^alpha sqrt(w)| / sqrt(w) over the grid, by scan.  For tabulated
// weights the derivative is a centered difference of sqrt(values).
inline double scan_ratio(const WeightSpec& w, const Grid& g, const std::array<int, 3>& alpha) {
  double best = 0.0;
  if (w.kind == WeightKind::constant) return 0.0;
  if (w.kind == WeightKind::inverse_quadratic) {
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < g.n; ++iy)
        for (int iz = 0; iz < g.n; ++iz) {
          double r = inv_quad_ratio(alpha, g.point(ix, iy, iz));
          if (r > best) best = r;
        }
    return best;
  }
  const Grid& tg = w.table->grid;
  const std::vector<double>& val = w.table->values;
  auto s = [&](int a, int b, int c) {
    return std::sqrt(val[static_cast<std::size_t>(
        tg.index((a % tg.n + tg.n) % tg.n, (b % tg.n + tg.n) % tg.n, (c % tg.n + tg.n) % tg.n))]);
  };
  double h = tg.dx();
  for (int ix = 0; ix < tg.n; ++ix)
    for (int iy = 0; iy < tg.n; ++iy)
      for (int iz = 0; iz < tg.n; ++iz) {
        auto shifted = [&](int da, int db, int dc) { return s(ix + da, iy + db, iz + dc); };
        double d = 0.0;
        int order = alpha[0] + alpha[1] + alpha[2];
        if (order == 1) {
          int ax = alpha[0] ? 0 : (alpha[1] ? 1 : 2);
          int da = ax == 0, db = ax == 1, dc = ax == 2;
          d = (shifted(da, db, dc) - shifted(-da, -db, -dc)) / (2 * h);
        } else if (alpha[0] == 2 || alpha[1] == 2 || alpha[2] == 2) {
          int ax = alpha[0] == 2 ? 0 : (alpha[1] == 2 ? 1 : 2);
          int da = ax == 0, db = ax == 1, dc = ax == 2;
          d = (shifted(da, db, dc) - 2 * shifted(0, 0, 0) + shifted(-da, -db, -dc)) / (h * h);
        } else {
          int a1 = alpha[0] ? 0 : 1;
          int a2 = alpha[2] ? 2 : 1;
          auto off = [&](int s1, int s2) {
            int d3[3] = {0, 0, 0};
            d3[a1] = s1;
            d3[a2] = s2;
            return shifted(d3[0], d3[1], d3[2]);
          };
          d = (off(1, 1) - off(1, -1) - off(-1, 1) + off(-1, -1)) / (4 * h * h);
        }
        double r = std::abs(d) / s(ix, iy, iz);
        if (r > best) best = r;
      }
  return best;
}

inline void fill_constants(WeightSpec& w, const Grid& g) {
  w.deriv_constants.clear();
  double g1sq = 0.0;
  for (const auto& alpha : multi_indices_up_to_two()) {
    double c = scan_ratio(w, g, alpha);
    w.deriv_constants.push_back({alpha, c});
    if (alpha[0] + alpha[1] + alpha[2] == 1) g1sq += c * c;
  }
  w.gamma = std::sqrt(g1sq);
}

}  // namespace detail

inline WeightSpec make_weight(WeightKind kind, const Grid& grid) {
  if (kind == WeightKind::tabulated)
    throw ConfigError("tabulated weight needs a sample table, use make_tabulated_weight");
  WeightSpec w;
  w.kind = kind;
  if (kind == WeightKind::constant) {
    w.C_w = 0.0;
    w.P_w = 0;
    w.gamma = 0.0;
    for (const auto& alpha : detail::multi_indices_up_to_two())
      w.deriv_constants.push_back({alpha, 0.0});
    return w;
  }
  w.C_w = 1.0;
  w.P_w = 2;
  detail::fill_constants(w, grid);
  return w;
}

inline WeightSpec make_weight(const std::string& kind, const Grid& grid) {
  return make_weight(parse_weight_kind(kind), grid);
}

// Wrap externally supplied samples as a weight.  The translation constants
// are the caller's claim about the function; weight_class_report can test it.
inline WeightSpec make_tabulated_weight(const Grid& grid, std::vector<double> values, double C_w,
                                        int P_w) {
  if (static_cast<std::int64_t>(values.size()) != grid.size())
    throw ConfigError("weight table has " + std::to_string(values.size()) +
                      " samples, grid needs " + std::to_string(grid.size()));
  for (double v : values)
    if (!(v > 0.0)) throw DomainError("weight table samples must be strictly positive");
  if (C_w < 0.0) throw ConfigError("translation constant C_w must be nonnegative");
  if (P_w < 0) throw ConfigError("translation exponent P_w must be nonnegative");
  WeightSpec w;
  w.kind = WeightKind::tabulated;
  w.C_w = C_w;
  w.P_w = P_w;
  w.table = std::make_shared<WeightTable>(WeightTable{grid, std::move(values)});
  detail::fill_constants(w, grid);
  return w;
}

struct WeightPairCheck {
  Vec3 x;
  Vec3 y;
  double ratio = 0.0;  // w(x) / w(x+y)
  double bound = 0.0;  // (1 + C_w ||y||)^{P_w}
  bool ok = true;
};

struct WeightClassReport {
  std::vector<WeightPairCheck> translation_checks;
  bool translation_ok = true;
  double worst_translation_excess = 0.0;  // max ratio/bound over the pairs
  bool derivative_ok = true;
  double worst_derivative_excess = 0.0;  // max measured/claimed ratio
};

// Empirical test of both class inequalities on the given (x, y) pairs.  The
// derivative bounds are probed with centered differences of sqrt(w) at each
// pair's base point.
inline WeightClassReport weight_class_report(const WeightSpec& w,
                                             const std::vector<std::pair<Vec3, Vec3>>& pairs,
                                             double fd_step = 1.0 / 64.0) {
  WeightClassReport rep;
  for (const auto& [x, y] : pairs) {
    WeightPairCheck chk;
    chk.x = x;
    chk.y = y;
    chk.ratio = w(x) / w(x + y);
    chk.bound = std::pow(1.0 + w.C_w * norm(y), w.P_w);
    chk.ok = chk.ratio <= chk.bound * (1.0 + 1e-12);
    rep.translation_ok = rep.translation_ok && chk.ok;
    if (chk.bound > 0.0 && chk.ratio / chk.bound > rep.worst_translation_excess)
      rep.worst_translation_excess = chk.ratio / chk.bound;
    rep.translation_checks.push_back(chk);

    double s0 = std::sqrt(w(x));
    for (const DerivConstant& dc : w.deriv_constants) {
      int order = dc.alpha[0] + dc.alpha[1] + dc.alpha[2];
      if (order == 0) continue;
      double h = fd_step;
      double d;
      auto sq = [&](double ax, double ay, double az) {
        return std::sqrt(w(x + Vec3{ax, ay, az}));
      };
      if (order == 1) {
        Vec3 e{double(dc.alpha[0]), double(dc.alpha[1]), double(dc.alpha[2])};
        d = (sq(h * e.x, h * e.y, h * e.z) - sq(-h * e.x, -h * e.y, -h * e.z)) / (2 * h);
      } else if (dc.alpha[0] == 2 || dc.alpha[1] == 2 || dc.alpha[2] == 2) {
        Vec3 e{double(dc.alpha[0] / 2), double(dc.alpha[1] / 2), double(dc.alpha[2] / 2)};
        d = (sq(h * e.x, h * e.y, h * e.z) - 2 * s0 + sq(-h * e.x, -h * e.y, -h * e.z)) / (h * h);
      } else {
        Vec3 e1{}, e2{};
        int seen = 0;
        for (int a = 0; a < 3; ++a)
          if (dc.alpha[static_cast<std::size_t>(a)]) {
            Vec3& e = seen++ ? e2 : e1;
            set_component(e, a, 1.0);
          }
        d = (sq(h * (e1.x + e2.x), h * (e1.y + e2.y), h * (e1.z + e2.z)) -
             sq(h * (e1.x - e2.x), h * (e1.y - e2.y), h * (e1.z - e2.z)) -
             sq(h * (e2.x - e1.x), h * (e2.y - e1.y), h * (e2.z - e1.z)) +
             sq(-h * (e1.x + e2.x), -h * (e1.y + e2.y), -h * (e1.z + e2.z))) /
            (4 * h * h);
      }
      double measured = std::abs(d) / s0;
      double claimed = dc.c;
      // Finite differences undershoot a true sup and carry O(h^2) error, so
      // flag only clear violations.
      if (measured > claimed * 1.01 + 1e-9) rep.derivative_ok = false;
      if (claimed > 0.0 && measured / claimed > rep.worst_derivative_excess)
        rep.worst_derivative_excess = measured / claimed;
    }
  }
  return rep;
}

}  // namespace rigidem
