#pragma once

// Structured-text scenario configs.  A config is a sequence of brace blocks,
//
//   grid     { n 64  L 32 }
//   weight   { kind inverse_quadratic }
//   coupling { preset ml }
//   particle { mass 1  charge 1  radius 2.5  q 0 0 0  p 0 0 0 }
//   init     { recipe soliton }
//   evolve   { scheme picard  dt 0.01  T 5  picard_tol 1e-10 }
//   output   { directory out/run  every 1  snapshot_every 0 }
//
// with '#' comments running to end of line.  particle blocks repeat, one per
// charge.  Everything is validated before any field memory is allocated.

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rigidem/charge_shape.hpp"
#include "rigidem/coupling.hpp"
#include "rigidem/errors.hpp"
#include "rigidem/evolution.hpp"
#include "rigidem/initial_data.hpp"
#include "rigidem/io.hpp"
#include "rigidem/weights.hpp"

namespace rigidem {

struct ParticleSpec {
  double mass = 1.0;
  double charge = 0.0;
  double radius = 1.0;
  Vec3 q{};
  Vec3 p{};
};

enum class InitRecipe { soliton, soliton_plane_wave, plane_wave, files };

inline InitRecipe parse_recipe(const std::string& s) {
  if (s == "soliton") return InitRecipe::soliton;
  if (s == "soliton+plane_wave") return InitRecipe::soliton_plane_wave;
  if (s == "plane_wave") return InitRecipe::plane_wave;
  if (s == "files") return InitRecipe::files;
  throw ConfigError("unknown init recipe '" + s + "'");
}

struct InitSpec {
  InitRecipe recipe = InitRecipe::soliton;
  double longitudinal_noise = 0.0;
  std::uint64_t noise_seed = 1;
  std::array<int, 3> wave_mode{1, 0, 0};
  Vec3 wave_polarization{0.0, 0.0, 1.0};
  double wave_amplitude = 0.1;
  std::vector<std::string> field_files;
};

struct OutputSpec {
  std::string directory = "out";
  int every = 1;           // diagnostics and trajectory row cadence, in accepted steps
  int snapshot_every = 0;  // field snapshot cadence; 0 disables snapshots
};

struct Scenario {
  double L = 0.0;
  int n = 0;
  WeightKind weight_kind = WeightKind::inverse_quadratic;
  CouplingPreset coupling_preset = CouplingPreset::ML;
  std::vector<std::vector<double>> coupling_rows;
  std::vector<ParticleSpec> particles;
  InitSpec init;
  EvolveConfig evolve;
  OutputSpec output;
};

namespace detail {

struct ConfigToken {
  std::string text;
  int line = 0;
};

inline std::vector<ConfigToken> tokenize_config(const std::string& text) {
  std::vector<ConfigToken> out;
  int line = 1;
  std::string cur;
  int cur_line = 1;
  auto flush = [&]() {
    if (!cur.empty()) {
      out.push_back({cur, cur_line});
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '#') {
      flush();
      while (i < text.size() && text[i] != '\n') ++i;
      ++line;
      continue;
    }
    if (c == '\n') {
      flush();
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (c == '{' || c == '}') {
      flush();
      out.push_back({std::string(1, c), line});
      continue;
    }
    if (cur.empty()) cur_line = line;
    cur += c;
  }
  flush();
  return out;
}

class ConfigCursor {
 public:
  explicit ConfigCursor(std::vector<ConfigToken> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const ConfigToken& peek() const {
    if (done()) throw ConfigError("config ended unexpectedly");
    return tokens_[pos_];
  }

  ConfigToken next(const std::string& what) {
    if (done()) throw ConfigError("config ended while reading " + what);
    return tokens_[pos_++];
  }

  void expect(const std::string& tok, const std::string& where) {
    ConfigToken t = next(where);
    if (t.text != tok)
      throw ConfigError("expected '" + tok + "' " + where + " at line " +
                        std::to_string(t.line) + ", got '" + t.text + "'");
  }

  bool looks_like_number() const {
    if (done()) return false;
    const std::string& s = tokens_[pos_].text;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  }

 private:
  std::vector<ConfigToken> tokens_;
  std::size_t pos_ = 0;
};

inline double config_double(ConfigCursor& c, const std::string& what) {
  return parse_double(c.next(what).text, what);
}

inline long config_long(ConfigCursor& c, const std::string& what) {
  return parse_long(c.next(what).text, what);
}

inline Vec3 config_vec3(ConfigCursor& c, const std::string& what) {
  Vec3 v;
  v.x = config_double(c, what + " x");
  v.y = config_double(c, what + " y");
  v.z = config_double(c, what + " z");
  return v;
}

inline bool config_flag(ConfigCursor& c, const std::string& what) {
  ConfigToken t = c.next(what);
  if (t.text == "1" || t.text == "true" || t.text == "on") return true;
  if (t.text == "0" || t.text == "false" || t.text == "off") return false;
  throw ConfigError("expected on/off for " + what + ", got '" + t.text + "'");
}

[[noreturn]] inline void unknown_key(const ConfigToken& t, const std::string& section) {
  throw ConfigError("unknown key '" + t.text + "' in " + section + " block at line " +
                    std::to_string(t.line));
}

inline void parse_grid_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after grid");
  for (;;) {
    ConfigToken t = c.next("grid block");
    if (t.text == "}") return;
    if (t.text == "n") sc.n = static_cast<int>(config_long(c, "grid n"));
    else if (t.text == "L") sc.L = config_double(c, "grid L");
    else unknown_key(t, "grid");
  }
}

inline void parse_weight_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after weight");
  for (;;) {
    ConfigToken t = c.next("weight block");
    if (t.text == "}") return;
    if (t.text == "kind") sc.weight_kind = parse_weight_kind(c.next("weight kind").text);
    else unknown_key(t, "weight");
  }
}

inline void parse_coupling_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after coupling");
  for (;;) {
    ConfigToken t = c.next("coupling block");
    if (t.text == "}") return;
    if (t.text == "preset") {
      sc.coupling_preset = parse_coupling_preset(c.next("coupling preset").text);
    } else if (t.text == "row") {
      std::vector<double> row;
      while (c.looks_like_number()) row.push_back(config_double(c, "coupling row entry"));
      if (row.empty())
        throw ConfigError("coupling row at line " + std::to_string(t.line) + " has no entries");
      sc.coupling_rows.push_back(std::move(row));
      sc.coupling_preset = CouplingPreset::custom;
    } else {
      unknown_key(t, "coupling");
    }
  }
}

inline void parse_particle_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after particle");
  ParticleSpec p;
  for (;;) {
    ConfigToken t = c.next("particle block");
    if (t.text == "}") break;
    if (t.text == "mass") p.mass = config_double(c, "particle mass");
    else if (t.text == "charge") p.charge = config_double(c, "particle charge");
    else if (t.text == "radius") p.radius = config_double(c, "particle radius");
    else if (t.text == "q") p.q = config_vec3(c, "particle q");
    else if (t.text == "p") p.p = config_vec3(c, "particle p");
    else unknown_key(t, "particle");
  }
  sc.particles.push_back(p);
}

inline void parse_init_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after init");
  for (;;) {
    ConfigToken t = c.next("init block");
    if (t.text == "}") return;
    if (t.text == "recipe") sc.init.recipe = parse_recipe(c.next("init recipe").text);
    else if (t.text == "longitudinal_noise")
      sc.init.longitudinal_noise = config_double(c, "init longitudinal_noise");
    else if (t.text == "noise_seed")
      sc.init.noise_seed = static_cast<std::uint64_t>(config_long(c, "init noise_seed"));
    else if (t.text == "wave_mode") {
      sc.init.wave_mode[0] = static_cast<int>(config_long(c, "init wave_mode x"));
      sc.init.wave_mode[1] = static_cast<int>(config_long(c, "init wave_mode y"));
      sc.init.wave_mode[2] = static_cast<int>(config_long(c, "init wave_mode z"));
    } else if (t.text == "wave_polarization")
      sc.init.wave_polarization = config_vec3(c, "init wave_polarization");
    else if (t.text == "wave_amplitude")
      sc.init.wave_amplitude = config_double(c, "init wave_amplitude");
    else if (t.text == "field") sc.init.field_files.push_back(c.next("init field path").text);
    else unknown_key(t, "init");
  }
}

inline void parse_evolve_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after evolve");
  for (;;) {
    ConfigToken t = c.next("evolve block");
    if (t.text == "}") return;
    if (t.text == "scheme") sc.evolve.scheme = parse_scheme(c.next("evolve scheme").text);
    else if (t.text == "dt") sc.evolve.dt = config_double(c, "evolve dt");
    else if (t.text == "T") sc.evolve.T = config_double(c, "evolve T");
    else if (t.text == "picard_tol") sc.evolve.picard_tol = config_double(c, "evolve picard_tol");
    else if (t.text == "picard_max_iter")
      sc.evolve.picard_max_iter = static_cast<int>(config_long(c, "evolve picard_max_iter"));
    else if (t.text == "quad_nodes")
      sc.evolve.quad_nodes = static_cast<int>(config_long(c, "evolve quad_nodes"));
    else if (t.text == "contraction_guard")
      sc.evolve.contraction_guard = config_flag(c, "evolve contraction_guard");
    else if (t.text == "verify_fixed_point")
      sc.evolve.verify_fixed_point = config_flag(c, "evolve verify_fixed_point");
    else unknown_key(t, "evolve");
  }
}

inline void parse_output_block(ConfigCursor& c, Scenario& sc) {
  c.expect("{", "after output");
  for (;;) {
    ConfigToken t = c.next("output block");
    if (t.text == "}") return;
    if (t.text == "directory") sc.output.directory = c.next("output directory").text;
    else if (t.text == "every")
      sc.output.every = static_cast<int>(config_long(c, "output every"));
    else if (t.text == "snapshot_every")
      sc.output.snapshot_every = static_cast<int>(config_long(c, "output snapshot_every"));
    else unknown_key(t, "output");
  }
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  detail::ConfigCursor c(detail::tokenize_config(text));
  Scenario sc;
  while (!c.done()) {
    detail::ConfigToken t = c.next("section name");
    if (t.text == "grid") detail::parse_grid_block(c, sc);
    else if (t.text == "weight") detail::parse_weight_block(c, sc);
    else if (t.text == "coupling") detail::parse_coupling_block(c, sc);
    else if (t.text == "particle") detail::parse_particle_block(c, sc);
    else if (t.text == "init") detail::parse_init_block(c, sc);
    else if (t.text == "evolve") detail::parse_evolve_block(c, sc);
    else if (t.text == "output") detail::parse_output_block(c, sc);
    else
      throw ConfigError("unknown key '" + t.text + "' at line " + std::to_string(t.line) +
                        " (expected grid, weight, coupling, particle, init, evolve, or output)");
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// Safe evolution half-span for the given box, supports, and step.  Light
// cones from the union of supports must never wrap around the torus within
// the run, with one step of slack for the final clamped step.
inline double scenario_horizon(const Scenario& sc) {
  double rmax = 0.0;
  for (const ParticleSpec& p : sc.particles) rmax = std::max(rmax, p.radius);
  return (sc.L / 2.0 - 2.0 * rmax - sc.evolve.dt) / 2.0;
}

// Full pre-allocation validation: grid shape, particle parameters, support
// fit, coupling matrix shape, recipe plumbing, and the causality horizon.
inline void validate_scenario(const Scenario& sc) {
  make_grid(sc.L, sc.n);
  validate_config(sc.evolve);
  std::size_t N = sc.particles.size();
  for (std::size_t i = 0; i < N; ++i) {
    const ParticleSpec& p = sc.particles[i];
    if (p.mass == 0.0)
      throw ConfigError("particle " + std::to_string(i) + " mass must be nonzero");
    if (!(p.radius > 0.0))
      throw ConfigError("particle " + std::to_string(i) + " radius must be positive, got " +
                        format_double(p.radius));
    if (!(2.0 * p.radius < sc.L / 2.0))
      throw GeometryError("particle " + std::to_string(i) + " support diameter " +
                          format_double(2.0 * p.radius) + " straddles more than half the box " +
                          "(L/2 = " + format_double(sc.L / 2.0) + ")");
  }
  if (sc.coupling_preset == CouplingPreset::custom) {
    if (sc.coupling_rows.size() != N)
      throw ConfigError("coupling matrix has " + std::to_string(sc.coupling_rows.size()) +
                        " rows for " + std::to_string(N) + " particles");
    for (const auto& row : sc.coupling_rows)
      if (row.size() != N)
        throw ConfigError("coupling matrix row has " + std::to_string(row.size()) +
                          " entries for " + std::to_string(N) + " particles");
  } else if (!sc.coupling_rows.empty()) {
    throw ConfigError("coupling block mixes a preset with explicit rows");
  }
  if (sc.init.recipe == InitRecipe::files && sc.init.field_files.size() != N)
    throw ConfigError("init recipe 'files' lists " + std::to_string(sc.init.field_files.size()) +
                      " fields for " + std::to_string(N) + " charges");
  bool wants_wave =
      sc.init.recipe == InitRecipe::plane_wave || sc.init.recipe == InitRecipe::soliton_plane_wave;
  if (wants_wave) {
    if (N == 0)
      throw ConfigError("plane-wave recipes need at least one particle to carry the field slot; "
                        "add a zero-charge particle for a source-free run");
    const auto& m = sc.init.wave_mode;
    if (m[0] == 0 && m[1] == 0 && m[2] == 0)
      throw ConfigError("wave_mode must be nonzero");
    for (int c = 0; c < 3; ++c)
      if (std::abs(m[static_cast<std::size_t>(c)]) >= sc.n / 2)
        throw ConfigError("wave_mode component " + std::to_string(m[static_cast<std::size_t>(c)]) +
                          " exceeds the grid band limit " + std::to_string(sc.n / 2 - 1));
  }
  if (sc.output.every < 1)
    throw ConfigError("output cadence must be at least 1, got " +
                      std::to_string(sc.output.every));
  if (sc.output.snapshot_every < 0)
    throw ConfigError("snapshot cadence must be nonnegative, got " +
                      std::to_string(sc.output.snapshot_every));
  double span = std::abs(sc.evolve.T);
  double safe = scenario_horizon(sc);
  if (!(span < safe))
    throw GeometryError("evolution span |T| = " + format_double(span) +
                        " reaches the periodic light-cone horizon; safe |T| for this box is " +
                        format_double(safe));
}

inline std::vector<ChargeShape> build_shapes(const Scenario& sc) {
  std::vector<ChargeShape> shapes;
  shapes.reserve(sc.particles.size());
  for (const ParticleSpec& p : sc.particles) shapes.push_back(make_charge_shape(p.radius, p.charge));
  return shapes;
}

inline CouplingMatrix build_coupling(const Scenario& sc) {
  if (sc.coupling_preset == CouplingPreset::custom)
    return make_custom_coupling(sc.coupling_rows);
  return make_coupling(sc.coupling_preset, sc.particles.size());
}

inline SystemContext build_system(const Scenario& sc, const Grid& g) {
  return SystemContext{build_shapes(sc), build_coupling(sc), make_weight(sc.weight_kind, g)};
}

// Assembles the initial phase-space point per the recipe.  A plane wave is a
// homogeneous solution and lives in charge slot 0; longitudinal noise, when
// requested, violates the constraints in every slot (seeded per slot).
inline PhaseSpacePoint build_initial_state(const Scenario& sc, const Grid& g,
                                           const std::vector<ChargeShape>& shapes) {
  PhaseSpacePoint phi;
  phi.grid = g;
  for (const ParticleSpec& p : sc.particles) {
    ParticleState s;
    s.q = p.q;
    s.p = p.p;
    s.m = p.mass;
    phi.particles.push_back(s);
  }
  std::size_t N = sc.particles.size();
  bool soliton = sc.init.recipe == InitRecipe::soliton ||
                 sc.init.recipe == InitRecipe::soliton_plane_wave;
  bool wave = sc.init.recipe == InitRecipe::plane_wave ||
              sc.init.recipe == InitRecipe::soliton_plane_wave;
  if (sc.init.recipe == InitRecipe::files) {
    for (std::size_t i = 0; i < N; ++i) {
      SnapshotData snap = read_field_snapshot(sc.init.field_files[i]);
      if (!(snap.pair.E.grid == g))
        throw ConfigError("field file '" + sc.init.field_files[i] +
                          "' was sampled on a different grid");
      phi.fields.push_back(std::move(snap.pair));
    }
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      if (soliton) phi.fields.push_back(coulomb_soliton(phi.particles[i], shapes[i], g));
      else phi.fields.emplace_back(g);
    }
    if (wave) {
      bool projected = false;
      FieldPair pw = plane_wave(g, sc.init.wave_mode, sc.init.wave_polarization,
                                sc.init.wave_amplitude, &projected);
      if (projected)
        std::fprintf(stderr,
                     "warning: wave_polarization was not transverse, projected onto the "
                     "plane orthogonal to the mode\n");
      add_field(phi.fields[0], pw);
    }
  }
  if (sc.init.longitudinal_noise > 0.0)
    for (std::size_t i = 0; i < N; ++i)
      add_longitudinal_noise(phi.fields[i], sc.init.longitudinal_noise,
                             sc.init.noise_seed + 2 * i);
  return phi;
}

}  // namespace rigidem
