#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dnf/grid.hpp"
#include "dnf/regularity.hpp"
#include "dnf/stepper.hpp"

namespace dnf {

// Complete description of a reproducible run: discretization, potential
// selections, initial datum, solver knobs, and the analytics requests the
// report subcommands honor. Parsed from a single TOML document; parsing is
// strict (unknown keys and malformed values fail with the field path) and
// serialization round-trips bit-exactly.
struct RunConfig {
  // [domain]
  int n = 1;
  std::array<double, kMaxDim> lo{0.0, 0.0};
  std::array<double, kMaxDim> hi{1.0, 1.0};
  std::array<int, kMaxDim> cells{99, 0};

  // [time]
  double T = 0.1;
  int N = 100;

  // [psi] / [F]
  int m = 1;
  PotentialSpec psi;
  PotentialSpec F;

  // [initial]
  std::string profile = "eigenmode";  // zero | eigenmode | bump | random-smooth
  unsigned seed = 1;
  double amplitude = 1.0;

  // [solver]
  SolverConfig solver;

  // [analytics]
  unsigned analytics_seed = 42;
  double decay_L = 10.0;
  double decay_vartheta = 0.25;
  double decay_epsilon = 0.1;
  double decay_rho = 0.5;
  double decay_gamma = 0.75;
  int decay_scales = 2;
  double map_radius = 0.22;
  std::vector<double> dimension_radii{0.04, 0.055, 0.075, 0.1, 0.14, 0.19, 0.26, 0.4};
  std::vector<int> frac_h_steps{1, 2, 4, 8};
  SpaceTimeRegion region{{0.2, 0.0}, {0.8, 0.0}, 0.02, 0.06};

  // [output]
  std::string output_dir = "out";

  BoxDomain domain() const { return BoxDomain(n, lo, hi, cells); }
  void validate() const;
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config(const std::filesystem::path& path);
std::string to_toml(const RunConfig& cfg);

// Samples the named analytic profile on the interior lattice.
SnapshotField initial_datum(const RunConfig& cfg);

// Normalized potential pair for the run (built-in families are already
// normalized; this also validates the declared bounds).
std::pair<ScalarPotential, MatrixPotential> build_potentials(const RunConfig& cfg);

}  // namespace dnf
