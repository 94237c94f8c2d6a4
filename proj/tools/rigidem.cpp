// Command line front end.  Four subcommands:
//   run <scenario>        evolve a scenario file and write artifacts
//   probe-lw              pointwise fields and ball-norm scaling of a worldline
//   check-weight <kind>   weight-class constants and inequality spot checks
//   norms <snapshot>      norm report for a stored field snapshot
// Failures print a single line "error <code>: <detail>" and exit nonzero.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rigidem/lienard_wiechert.hpp"
#include "rigidem/norms.hpp"
#include "rigidem/runner.hpp"

namespace {

using namespace rigidem;

Vec3 to_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

int cmd_run(const std::string& path, const std::string& scheme, double dt, double T,
            const std::string& out_dir, long seed, bool plots) {
  RunOverrides ov;
  if (!scheme.empty()) ov.scheme = parse_scheme(scheme);
  if (dt > 0.0) ov.dt = dt;
  if (T != 0.0) ov.T = T;
  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (seed >= 0) ov.noise_seed = static_cast<std::uint64_t>(seed);
  ov.emit_plots_data = plots;

  RunSummary s = run_scenario_file(path, ov);
  std::printf("t_reached\t%s\n", format_double(s.t_reached).c_str());
  std::printf("steps\t%d\n", s.steps);
  std::printf("rejected\t%d\n", s.rejected);
  for (const std::string& f : s.files) std::printf("wrote\t%s\n", f.c_str());
  return 0;
}

int cmd_probe_lw(const std::string& kind, double r0, double omega, Vec3 center, Vec3 velocity,
                 double charge, double t, const std::string& cone_name,
                 std::vector<double> radii, const std::string& weight_kind) {
  Worldline wl;
  if (kind == "static") wl = static_worldline(center, charge);
  else if (kind == "uniform") wl = uniform_worldline(center, velocity, charge);
  else if (kind == "circular") wl = circular_worldline(center, r0, omega, charge);
  else throw ConfigError("unknown worldline kind '" + kind + "'");

  LightCone cone;
  if (cone_name == "retarded") cone = LightCone::retarded;
  else if (cone_name == "advanced") cone = LightCone::advanced;
  else throw ConfigError("unknown light cone '" + cone_name + "'");

  if (radii.empty()) radii = {2.0, 50.0, 100.0, 200.0, 400.0};

  std::printf("# worldline %s  charge %s  t %s  cone %s\n", kind.c_str(),
              format_double(charge).c_str(), format_double(t).c_str(), cone_name.c_str());
  std::printf("# field samples along +x from the center\n");
  std::printf("r\tEx\tEy\tEz\tBx\tBy\tBz\n");
  int nsamp = 8;
  for (int i = 0; i < nsamp; ++i) {
    double r = radii.front() * std::pow(radii.back() / radii.front(), double(i) / (nsamp - 1));
    LwSample s = lw_field(wl, center + Vec3{r, 0.0, 0.0}, t, cone);
    std::printf("%s\t%s\t%s\t%s\t%s\t%s\t%s\n", format_double(r).c_str(),
                format_double(s.E.x).c_str(), format_double(s.E.y).c_str(),
                format_double(s.E.z).c_str(), format_double(s.B.x).c_str(),
                format_double(s.B.y).c_str(), format_double(s.B.z).c_str());
  }

  WeightSpec w = make_weight(weight_kind, make_grid(16.0, 16));
  auto field = [&](Vec3 x) { return lw_field(wl, x, t, cone).E; };
  ScalingProbeResult pr = norm_scaling_probe(field, radii, w);
  std::printf("# cumulative ball norms from the inner cutoff radius\n");
  std::printf("R\tL2\tL2w\n");
  for (std::size_t i = 0; i < pr.radii.size(); ++i)
    std::printf("%s\t%s\t%s\n", format_double(pr.radii[i]).c_str(),
                format_double(pr.l2_norms[i]).c_str(), format_double(pr.l2w_norms[i]).c_str());
  std::printf("l2_exponent\t%s\n", format_double(pr.l2_exponent).c_str());
  std::printf("l2w_exponent\t%s\n", format_double(pr.l2w_exponent).c_str());
  if (kind == "circular") {
    double slope = radial_decay_slope(wl, t, 10.0 * r0, 40.0 * r0, 12, cone);
    std::printf("far_zone_decay_slope\t%s\n", format_double(slope).c_str());
  }
  return 0;
}

int cmd_check_weight(const std::string& kind, const std::string& table_path, double cw_claim,
                     int pw_claim) {
  WeightSpec w;
  if (kind == "tabulated") {
    if (table_path.empty())
      throw ConfigError("check-weight tabulated needs --table with a scalar sample file");
    ScalarTable table = read_scalar_table(table_path);
    w = make_tabulated_weight(table.grid, std::move(table.values), cw_claim, pw_claim);
  } else {
    w = make_weight(kind, make_grid(16.0, 16));
  }
  std::printf("kind\t%s\n", weight_kind_name(w.kind));
  std::printf("C_w\t%s\n", format_double(w.C_w).c_str());
  std::printf("P_w\t%d\n", w.P_w);
  std::printf("gamma\t%s\n", format_double(w.gamma).c_str());
  for (const DerivConstant& dc : w.deriv_constants)
    std::printf("deriv_d%d%d%d\t%s\n", dc.alpha[0], dc.alpha[1], dc.alpha[2],
                format_double(dc.c).c_str());

  std::vector<std::pair<Vec3, Vec3>> pairs{
      {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}},   {{1.0, 2.0, -1.0}, {-2.0, 1.0, 2.0}},
      {{3.0, -3.0, 2.0}, {0.5, 0.5, 0.5}},  {{0.5, 0.0, 0.0}, {-4.0, 2.0, 1.0}},
      {{-2.0, -2.0, -2.0}, {3.0, 3.0, 3.0}}};
  WeightClassReport rep = weight_class_report(w, pairs);
  std::printf("translation_ok\t%d\n", rep.translation_ok ? 1 : 0);
  std::printf("worst_translation_excess\t%s\n",
              format_double(rep.worst_translation_excess).c_str());
  std::printf("derivative_ok\t%d\n", rep.derivative_ok ? 1 : 0);
  std::printf("worst_derivative_excess\t%s\n",
              format_double(rep.worst_derivative_excess).c_str());
  return 0;
}

int cmd_norms(const std::string& snapshot, const std::string& weight_kind) {
  SnapshotData snap = read_field_snapshot(snapshot);
  WeightSpec w = make_weight(weight_kind, snap.pair.E.grid);
  std::printf("t\t%s\n", format_double(snap.t).c_str());
  for (auto [name, f] : {std::pair<const char*, const VectorField*>{"E", &snap.pair.E},
                         {"B", &snap.pair.B}}) {
    NormReport rep = field_norm(*f, w);
    std::printf("%s_l2\t%s\n", name, format_double(rep.l2).c_str());
    std::printf("%s_l2w\t%s\n", name, format_double(rep.l2w).c_str());
    for (std::size_t k = 0; k < rep.hkw.size(); ++k)
      std::printf("%s_h%zuw\t%s\n", name, k, format_double(rep.hkw[k]).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral simulator for rigid charges coupled to their own Maxwell fields"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker thread count (results are thread-count independent)");

  auto* run = app.add_subcommand("run", "evolve a scenario file");
  run->fallthrough();
  std::string scenario_path, run_scheme, run_out;
  double run_dt = 0.0, run_T = 0.0;
  long run_seed = -1;
  bool run_plots = false;
  run->add_option("scenario", scenario_path, "scenario config file")->required();
  run->add_option("--scheme", run_scheme, "override integrator: picard or strang");
  run->add_option("--dt", run_dt, "override step size");
  run->add_option("--T", run_T, "override evolution span (sign sets direction)");
  run->add_option("--out-dir", run_out, "override output directory");
  run->add_option("--seed", run_seed, "override the noise seed for randomized initial data");
  run->add_flag("--emit-plots-data", run_plots, "write per-diagnostic two-column files");

  auto* probe = app.add_subcommand("probe-lw", "sample closed-form worldline fields");
  probe->fallthrough();
  std::string wl_kind = "static", cone_name = "retarded", probe_weight = "inverse_quadratic";
  double pr_r0 = 1.0, pr_omega = 0.7, pr_charge = 1.0, pr_t = 0.0;
  std::vector<double> center_v{0.0, 0.0, 0.0}, velocity_v{0.0, 0.0, 0.0}, radii;
  probe->add_option("--worldline", wl_kind, "static, uniform, or circular");
  probe->add_option("--r0", pr_r0, "orbit radius (circular)");
  probe->add_option("--omega", pr_omega, "angular frequency (circular)");
  probe->add_option("--center", center_v, "worldline center")->expected(3);
  probe->add_option("--velocity", velocity_v, "velocity (uniform)")->expected(3);
  probe->add_option("--charge", pr_charge, "charge");
  probe->add_option("--t", pr_t, "observation time");
  probe->add_option("--cone", cone_name, "retarded or advanced");
  probe->add_option("--radii", radii, "probe radii, comma separated")->delimiter(',');
  probe->add_option("--weight", probe_weight, "weight kind for the weighted norms");

  auto* chk = app.add_subcommand("check-weight", "weight-class constants and spot checks");
  chk->fallthrough();
  std::string chk_kind, chk_table;
  double chk_cw = 1.0;
  int chk_pw = 2;
  chk->add_option("kind", chk_kind, "constant, inverse_quadratic, or tabulated")->required();
  chk->add_option("--table", chk_table, "scalar sample file for tabulated weights");
  chk->add_option("--C_w", chk_cw, "claimed translation constant (tabulated)");
  chk->add_option("--P_w", chk_pw, "claimed translation exponent (tabulated)");

  auto* nrm = app.add_subcommand("norms", "norm report for a stored snapshot");
  nrm->fallthrough();
  std::string nrm_snapshot, nrm_weight = "inverse_quadratic";
  nrm->add_option("snapshot", nrm_snapshot, "snapshot file (with .meta sidecar)")->required();
  nrm->add_option("--weight", nrm_weight, "weight kind");

  CLI11_PARSE(app, argc, argv);

  try {
    rigidem::set_thread_count(threads);
    if (*run)
      return cmd_run(scenario_path, run_scheme, run_dt, run_T, run_out, run_seed, run_plots);
    if (*probe)
      return cmd_probe_lw(wl_kind, pr_r0, pr_omega, to_vec3(center_v), to_vec3(velocity_v),
                          pr_charge, pr_t, cone_name, radii, probe_weight);
    if (*chk) return cmd_check_weight(chk_kind, chk_table, chk_cw, chk_pw);
    if (*nrm) return cmd_norms(nrm_snapshot, nrm_weight);
  } catch (const rigidem::Error& e) {
    std::fprintf(stderr, "error %s: %s\n", e.code().c_str(), e.what());
    return 1;
  }
  return 0;
}
