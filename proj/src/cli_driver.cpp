#include "dnf/cli_driver.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "dnf/acceptance.hpp"
#include "dnf/energy.hpp"
#include "dnf/regularity.hpp"
#include "dnf/reports.hpp"
#include "dnf/run_config.hpp"
#include "dnf/trajectory_io.hpp"

namespace dnf {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCorrupt = 4;
constexpr int kExitGeometry = 5;

std::ostream& open_output(std::ofstream& file, const std::string& out_path) {
  if (out_path.empty()) return std::cout;
  file.open(out_path, std::ios::trunc);
  if (!file) throw io_error("cannot open '" + out_path + "' for writing");
  return file;
}

int cmd_solve(const std::string& config_path) {
  RunConfig cfg = parse_run_config(config_path);
  if (const char* env = std::getenv("DNFLOW_OUTDIR")) {
    if (*env) cfg.output_dir = env;
  }
  std::filesystem::create_directories(cfg.output_dir);
  const Trajectory traj = solve_from_config(cfg);
  const auto traj_path = std::filesystem::path(cfg.output_dir) / "trajectory.dnf";
  write_trajectory(traj_path, traj);
  write_step_reports(std::filesystem::path(cfg.output_dir) / "steps.jsonl", traj);
  double worst = 0.0;
  for (const auto& rep : traj.reports) worst = std::max(worst, rep.final_residual);
  std::cout << "solved " << traj.steps() << " steps, worst residual " << format_g17(worst)
            << ", wrote " << traj_path.string() << "\n";
  return 0;
}

DecayParams decay_params_for(const Trajectory& traj, double L, double vartheta, double epsilon,
                             double rho, double gamma) {
  const ConvexityBounds fb = make_matrix_potential(traj.F_spec, traj.m, traj.domain.n).bounds;
  return thresholds(epsilon, rho, vartheta, L, gamma, traj.domain.n, fb.alpha);
}

}  // namespace

Trajectory solve_from_config(const RunConfig& cfg) {
  auto [psi, F] = build_potentials(cfg);
  return run_scheme(initial_datum(cfg), psi, F, cfg.psi, cfg.F, cfg.N, cfg.T, cfg.solver);
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"implicit-scheme solver and regularity analytics for doubly nonlinear flows"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve_cmd = app.add_subcommand("solve", "run the implicit scheme from a TOML config");
  solve_cmd->add_option("--config", config_path, "run configuration")->required();

  std::string traj_path, out_path;
  auto* energy_cmd = app.add_subcommand("energy-report", "per-step energy ledger as CSV");
  energy_cmd->add_option("--traj", traj_path, "trajectory file")->required();
  energy_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  double map_r = 0.22, map_L = 10.0, map_vartheta = 0.25, map_eps = 0.1, map_rho = 0.5,
         map_gamma = 0.75;
  int map_nx = 9, map_nt = 9, map_scales = 2;
  auto* map_cmd = app.add_subcommand("regularity-map", "local energy and decay flags over a sweep");
  map_cmd->add_option("--traj", traj_path, "trajectory file")->required();
  map_cmd->add_option("--out", out_path, "output CSV (default stdout)");
  map_cmd->add_option("--r", map_r, "cylinder radius");
  map_cmd->add_option("--nx", map_nx, "centers per spatial axis");
  map_cmd->add_option("--nt", map_nt, "centers in time");
  map_cmd->add_option("--L", map_L, "magnitude cap");
  map_cmd->add_option("--vartheta", map_vartheta, "scale shrink factor");
  map_cmd->add_option("--epsilon", map_eps, "entry threshold seed");
  map_cmd->add_option("--rho", map_rho, "radius ceiling seed");
  map_cmd->add_option("--gamma", map_gamma, "decay exponent parameter");
  map_cmd->add_option("--scales", map_scales, "number of shrink scales");

  std::string fixture;
  double dim_rmin = 0.06, dim_threshold = 1e-3, dim_cap = 10.0;
  std::vector<double> dim_radii;
  auto* dim_cmd = app.add_subcommand("dimension", "parabolic covering counts and dimension fit");
  dim_cmd->add_option("--traj", traj_path, "trajectory file (flag singular candidates)");
  dim_cmd->add_option("--fixture", fixture, "synthetic point set: point | slice | box");
  dim_cmd->add_option("--radii", dim_radii, "covering radii")->expected(-3);
  dim_cmd->add_option("--r-min", dim_rmin, "candidate scan radius");
  dim_cmd->add_option("--threshold", dim_threshold, "energy threshold for candidates");
  dim_cmd->add_option("--cap", dim_cap, "magnitude cap for candidates");
  dim_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  std::string field = "vt";
  std::vector<double> region_spec;
  std::vector<int> h_steps{1, 2, 4, 8};
  auto* frac_cmd = app.add_subcommand("frac-exponent", "time difference-quotient masses and slope");
  frac_cmd->add_option("--traj", traj_path, "trajectory file")->required();
  frac_cmd->add_option("--field", field, "vt | d2v");
  frac_cmd->add_option("--region", region_spec, "x-lo.. x-hi.. t0 t1 (2n+2 numbers)")
      ->expected(-4);
  frac_cmd->add_option("--h-steps", h_steps, "offsets in step counts");
  frac_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  std::string validate_out = "validate-out";
  auto* validate_cmd = app.add_subcommand("validate", "run the full acceptance suite");
  validate_cmd->add_option("--out", validate_out, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (solve_cmd->parsed()) {
      return cmd_solve(config_path);
    }
    if (energy_cmd->parsed()) {
      const Trajectory traj = read_trajectory(traj_path);
      const ScalarPotential psi = make_scalar_potential(traj.psi_spec, traj.m);
      const MatrixPotential F = make_matrix_potential(traj.F_spec, traj.m, traj.domain.n);
      std::ofstream file;
      write_energy_csv(open_output(file, out_path), build_energy_ledger(traj, psi, F));
      return 0;
    }
    if (map_cmd->parsed()) {
      const Trajectory traj = read_trajectory(traj_path);
      const TrajectoryAnalytics an(traj);
      const DecayParams params =
          decay_params_for(traj, map_L, map_vartheta, map_eps, map_rho, map_gamma);
      const auto centers = admissible_center_grid(traj, map_r, map_nx, map_nt);
      if (centers.empty()) {
        throw geometry_error("no admissible centers at this radius", "radius");
      }
      std::ofstream file;
      write_regularity_map_csv(open_output(file, out_path), an, centers, map_r, params,
                               map_scales);
      return 0;
    }
    if (dim_cmd->parsed()) {
      std::vector<SpaceTimePoint> points;
      if (!fixture.empty()) {
        if (fixture == "point") {
          points.push_back({{0.5, 0.0}, 0.05});
        } else if (fixture == "slice") {
          for (int i = 1; i < 2000; ++i) points.push_back({{i / 2000.0, 0.0}, 0.05});
        } else if (fixture == "box") {
          for (int i = 0; i < 400; ++i) {
            for (int j = 0; j < 5000; ++j) {
              points.push_back({{4.0 * (i + 0.5) / 400.0, 0.0}, (j + 0.5) / 5000.0});
            }
          }
        } else {
          throw config_error("unknown fixture '" + fixture + "'");
        }
        if (dim_radii.empty()) {
          dim_radii = fixture == "box"
                          ? std::vector<double>{0.02, 0.028, 0.04, 0.057, 0.08, 0.113, 0.16, 0.29}
                          : std::vector<double>{0.006, 0.009, 0.014, 0.021, 0.032,
                                                0.05,  0.08,  0.12,  0.19};
        }
      } else if (!traj_path.empty()) {
        const Trajectory traj = read_trajectory(traj_path);
        const TrajectoryAnalytics an(traj);
        const auto centers = admissible_center_grid(traj, dim_rmin, 24, 24);
        points = singular_candidates(an, centers, dim_rmin, dim_threshold, dim_cap);
        if (dim_radii.empty()) {
          throw config_error("dimension --traj mode needs an explicit --radii list");
        }
      } else {
        throw config_error("dimension needs --fixture or --traj");
      }
      const int n = 1;
      std::ofstream file;
      write_dimension_csv(open_output(file, out_path), parabolic_dimension(points, n, dim_radii));
      return 0;
    }
    if (frac_cmd->parsed()) {
      const Trajectory traj = read_trajectory(traj_path);
      const TrajectoryAnalytics an(traj);
      const int n = traj.domain.n;
      SpaceTimeRegion region;
      if (region_spec.empty()) {
        for (int d = 0; d < n; ++d) {
          const double len = traj.domain.hi[d] - traj.domain.lo[d];
          region.xlo[d] = traj.domain.lo[d] + 0.2 * len;
          region.xhi[d] = traj.domain.lo[d] + 0.8 * len;
        }
        region.t0 = 0.2 * traj.horizon();
        region.t1 = 0.6 * traj.horizon();
      } else {
        if (static_cast<int>(region_spec.size()) != 2 * n + 2) {
          throw config_error("--region needs 2n+2 numbers");
        }
        for (int d = 0; d < n; ++d) {
          region.xlo[d] = region_spec[d];
          region.xhi[d] = region_spec[n + d];
        }
        region.t0 = region_spec[2 * n];
        region.t1 = region_spec[2 * n + 1];
      }
      FieldKind kind;
      if (field == "vt") {
        kind = FieldKind::TimeDerivative;
      } else if (field == "d2v") {
        kind = FieldKind::SecondGradient;
      } else {
        throw config_error("--field must be vt or d2v");
      }
      std::vector<double> hs;
      for (int s : h_steps) hs.push_back(s * traj.tau);
      std::ofstream file;
      write_frac_csv(open_output(file, out_path),
                     fractional_quotient_exponent(an, kind, region, hs));
      return 0;
    }
    if (validate_cmd->parsed()) {
      const auto results = run_acceptance(validate_out, std::cout);
      for (const auto& r : results) {
        if (!r.pass) return 1;
      }
      return 0;
    }
  } catch (const numeric_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const io_error& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const geometry_error& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kExitGeometry;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const contract_error& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace dnf
