#pragma once

#include <cstdint>

#include "kropina/report.hpp"
#include "kropina/rng.hpp"
#include "kropina/scenario.hpp"

// Executes a scenario: resolves points, instantiates the one-form at each,
// runs the selected checks, and assembles the deterministic report.  Point
// evaluations are pure and may fan out to worker threads; records are always
// emitted in point order, so parallelism cannot change the report.
namespace kropina {

struct RunOptions {
  int jobs = 1;
  bool has_seed = false;
  std::uint64_t seed = 0;  // overrides sampler and generator seeds
  bool has_tol_rel = false;
  double tol_rel = 0;
  bool has_tol_abs = false;
  double tol_abs = 0;
};

struct RunResult {
  Report report;
  int exit_code = 0;  // 0 all checks pass, 1 at least one failed
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {});

// Derives the per-point stream seed; stable under reordering of points.
std::uint64_t point_seed(std::uint64_t scenario_seed, int point_index);

// Seeded one-form generators used by the generator directives and by tests.
// All enforce the cone condition and redraw on near-degenerate scalars.
HVectorSpec random_parallel_spec(Rng& rng, const BaseGeometry<double>& base);
HVectorSpec random_generic_spec(Rng& rng, const BaseGeometry<double>& base);
HVectorSpec random_projective_spec(Rng& rng, const BaseGeometry<double>& base);

// The concrete spec the runner would use at one resolved point.
HVectorSpec instantiate_hvector(const Scenario& sc, int point_index,
                                const BaseGeometry<double>& base);

}  // namespace kropina
