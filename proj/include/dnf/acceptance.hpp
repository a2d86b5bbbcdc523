#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace dnf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the full validation suite: solver exactness against the closed-form
// decay, the discrete energy identities and a-priori bounds, the step-solver
// oracle, the conjugate/certification suite, the two-scale decay lemma, the
// regularity sweep, the dimension-estimator fixtures, threshold arithmetic,
// and output determinism. Prints one line per criterion to `log` and writes
// its CSV artifacts under `outdir`.
std::vector<CriterionResult> run_acceptance(const std::filesystem::path& outdir,
                                            std::ostream& log);

}  // namespace dnf
