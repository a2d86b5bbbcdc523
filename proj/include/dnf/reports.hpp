#pragma once

#include <ostream>
#include <vector>

#include "dnf/energy.hpp"
#include "dnf/regularity.hpp"

namespace dnf {

// CSV emitters shared by the command-line tools and the validation suite.
// All numbers print with %.17g so repeated runs are byte-identical.

void write_energy_csv(std::ostream& os, const EnergyLedger& ledger);

// Deterministic sweep of admissible cylinder centers for a given radius:
// an nx-by-nt lattice inside the admissible rectangle, skipping centers the
// grid cannot resolve.
std::vector<SpaceTimePoint> admissible_center_grid(const Trajectory& traj, double r, int nx,
                                                   int nt);

void write_regularity_map_csv(std::ostream& os, const TrajectoryAnalytics& an,
                              const std::vector<SpaceTimePoint>& centers, double r,
                              const DecayParams& params, int scales);

void write_dimension_csv(std::ostream& os, const DimensionEstimate& est);

void write_frac_csv(std::ostream& os, const FractionalQuotients& fq);

std::string format_g17(double v);

}  // namespace dnf
