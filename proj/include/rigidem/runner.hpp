#pragma once

// End-to-end scenario driver: build the system, evolve, and stream
// trajectory plus diagnostics rows to disk.  Output files are written under a
// .partial suffix and renamed only on success, so an aborted run never leaves
// a clean-looking truncated artifact.  All numbers go through format_double
// and all reductions are deterministic, which makes reruns byte-identical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rigidem/diagnostics.hpp"
#include "rigidem/evolution.hpp"
#include "rigidem/io.hpp"
#include "rigidem/scenario.hpp"

namespace rigidem {

struct RunOverrides {
  std::optional<Scheme> scheme;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> noise_seed;
  bool emit_plots_data = false;
};

struct RunSummary {
  double t_reached = 0.0;
  int steps = 0;
  int rejected = 0;
  std::string directory;
  std::vector<std::string> files;
};

namespace detail {

// Text sink that exists as "<path>.partial" until commit() renames it.
class PartialFile {
 public:
  explicit PartialFile(std::string path) : path_(std::move(path)), out_(path_ + ".partial") {
    if (!out_) throw IoError("cannot open '" + path_ + ".partial' for writing");
  }

  std::ofstream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw IoError("short write to '" + path_ + ".partial'");
    out_.close();
    std::filesystem::rename(path_ + ".partial", path_);
    committed_ = true;
  }

  const std::string& path() const { return path_; }
  bool committed() const { return committed_; }

 private:
  std::string path_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void row_out(std::ofstream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << '\t';
    out << format_double(values[i]);
  }
  out << '\n';
}

}  // namespace detail

inline RunSummary run_scenario(Scenario sc, const RunOverrides& ov = {}) {
  if (ov.scheme) sc.evolve.scheme = *ov.scheme;
  if (ov.dt) sc.evolve.dt = *ov.dt;
  if (ov.T) sc.evolve.T = *ov.T;
  if (ov.out_dir) sc.output.directory = *ov.out_dir;
  if (ov.noise_seed) sc.init.noise_seed = *ov.noise_seed;
  validate_scenario(sc);

  Grid g = make_grid(sc.L, sc.n);
  SystemContext sys = build_system(sc, g);
  PhaseSpacePoint phi0 = build_initial_state(sc, g, sys.shapes);
  GrowthConstants gc =
      growth_constants(phi0, sys.shapes, sys.weight, sys.coupling, sc.evolve.T);

  std::filesystem::create_directories(sc.output.directory);
  std::string dir = sc.output.directory;
  RunSummary summary;
  summary.directory = dir;

  detail::PartialFile traj(dir + "/trajectory.tsv");
  detail::PartialFile diag(dir + "/diagnostics.tsv");

  std::size_t N = phi0.charges();
  {
    std::ofstream& t = traj.stream();
    t << "t";
    for (std::size_t i = 0; i < N; ++i) {
      t << "\tq" << i << "x\tq" << i << "y\tq" << i << "z";
      t << "\tp" << i << "x\tp" << i << "y\tp" << i << "z";
      t << "\tv" << i << "x\tv" << i << "y\tv" << i << "z";
    }
    t << '\n';
    std::ofstream& d = diag.stream();
    d << "t\tH_per\tH_tot";
    for (std::size_t i = 0; i < N; ++i) d << "\tgauss_" << i;
    for (std::size_t i = 0; i < N; ++i) d << "\tdivB_" << i;
    d << "\tphase_norm\tmargin\n";
  }

  // Per-diagnostic series kept for the optional plot files.
  std::vector<double> times;
  std::vector<std::vector<double>> series;  // indexed like the diagnostics columns
  std::size_t ncols = 2 + 2 * N + 2;
  series.resize(ncols);

  auto write_rows = [&](const PhaseSpacePoint& phi, double t) {
    std::vector<double> trow{t};
    for (std::size_t i = 0; i < N; ++i) {
      const ParticleState& s = phi.particles[i];
      Vec3 v = velocity(s);
      trow.insert(trow.end(), {s.q.x, s.q.y, s.q.z, s.p.x, s.p.y, s.p.z, v.x, v.y, v.z});
    }
    detail::row_out(traj.stream(), trow);

    DiagnosticsRecord rec = make_record(t, phi, sys.shapes, sys.weight, gc);
    std::vector<double> drow{rec.t, rec.H_per, rec.H_tot};
    drow.insert(drow.end(), rec.gauss.begin(), rec.gauss.end());
    drow.insert(drow.end(), rec.divB.begin(), rec.divB.end());
    drow.push_back(rec.phase_norm);
    drow.push_back(rec.propagator_bound_margin);
    detail::row_out(diag.stream(), drow);

    times.push_back(t);
    for (std::size_t c = 0; c < ncols; ++c) series[c].push_back(drow[c + 1]);
  };

  auto snapshot_state = [&](const PhaseSpacePoint& phi, double t, int step) {
    for (std::size_t i = 0; i < N; ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "fields_step%06d_charge%zu.f64", step, i);
      std::string target = dir + "/" + name;
      write_field_snapshot(target + ".partial", phi.fields[i], t);
      std::filesystem::rename(target + ".partial", target);
      std::filesystem::rename(target + ".partial.meta", target + ".meta");
      summary.files.push_back(target);
    }
  };

  write_rows(phi0, 0.0);
  if (sc.output.snapshot_every > 0) snapshot_state(phi0, 0.0, 0);

  int accepted = 0;
  int last_emitted = 0;
  EvolveResult res =
      evolve(phi0, sys, sc.evolve, [&](const PhaseSpacePoint& phi, double t, const StepReport&) {
        ++accepted;
        if (accepted % sc.output.every == 0) {
          write_rows(phi, t);
          last_emitted = accepted;
        }
        if (sc.output.snapshot_every > 0 && accepted % sc.output.snapshot_every == 0)
          snapshot_state(phi, t, accepted);
      });
  if (last_emitted != accepted) write_rows(res.state, res.t_reached);

  traj.commit();
  diag.commit();
  summary.files.push_back(traj.path());
  summary.files.push_back(diag.path());

  if (ov.emit_plots_data) {
    std::filesystem::create_directories(dir + "/plots");
    std::vector<std::string> names{"H_per", "H_tot"};
    for (std::size_t i = 0; i < N; ++i) names.push_back("gauss_" + std::to_string(i));
    for (std::size_t i = 0; i < N; ++i) names.push_back("divB_" + std::to_string(i));
    names.push_back("phase_norm");
    names.push_back("margin");
    for (std::size_t c = 0; c < ncols; ++c) {
      detail::PartialFile pf(dir + "/plots/" + names[c] + ".tsv");
      for (std::size_t k = 0; k < times.size(); ++k)
        pf.stream() << format_double(times[k]) << '\t' << format_double(series[c][k]) << '\n';
      pf.commit();
      summary.files.push_back(pf.path());
    }
  }

  summary.t_reached = res.t_reached;
  summary.steps = res.steps;
  summary.rejected = res.rejected;
  return summary;
}

inline RunSummary run_scenario_file(const std::string& path, const RunOverrides& ov = {}) {
  return run_scenario(load_scenario(path), ov);
}

}  // namespace rigidem
