#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kropina/hvector.hpp"
#include "kropina/metric.hpp"
#include "kropina/tol.hpp"

// Declarative run descriptions.  A scenario names a metric (catalog entry or
// inline definition), a one-form (explicit spec or a seeded generator), a set
// of evaluation points (explicit or sampled), the checks to run, and the
// tolerances.  Parsing is strict: unknown keys and malformed shapes fail with
// the offending field named.
namespace kropina {

struct PointSpec {
  Vec<double> x, y;
};

struct SamplerSpec {
  int count = 0;
  std::uint64_t seed = 1;
  std::vector<std::array<double, 2>> box;  // per-coordinate [lo, hi]
  double cone_margin = 0.1;                // require beta > margin * L * |b|
};

struct GeneratorDirective {
  enum class Kind { none, zero_bcov, random, projective };
  Kind kind = Kind::none;
  std::uint64_t seed = 1;
};

struct Tolerances {
  double tol_rel = 1e-8;
  double tol_abs = 1e-9;
  double nonproj_threshold = tol::nonprojective_floor;
};

struct GeodesicParams {
  int steps = 200;
  double dt = 1e-3;
  double defect_tol = 1e-6;
};

struct Scenario {
  std::string name;
  std::vector<MetricSpec> metrics;  // one or more, all of the same dimension
  HVectorSpec hvector;              // used when generator.kind == none
  GeneratorDirective generator;
  std::vector<PointSpec> points;  // explicit points, if any
  bool has_sampler = false;
  SamplerSpec sampler;
  std::vector<std::string> checks;  // canonical ids, validated
  Tolerances tolerances;
  GeodesicParams geodesic;
  std::string source_text;  // raw file content, hashed into the report

  int dim() const { return metrics.empty() ? 0 : metrics.front().n; }
};

// Canonical check ids in catalog order.  "theorem41" is accepted as an alias
// for "projective" on input.
const std::vector<std::string>& check_catalog();

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Concrete evaluation points for one of the scenario's metrics.  Explicit
// points are validated against the domain guards (first offender reported);
// sampled points are drawn from the box/sphere sampler with cone rejection.
// More than 50% rejection aborts.
struct ResolvedPoints {
  std::vector<PointSpec> points;
  int rejected = 0;
};
ResolvedPoints resolve_points(const Scenario& sc, const MetricSpec& metric);

std::uint64_t fnv1a(std::string_view data);

}  // namespace kropina
