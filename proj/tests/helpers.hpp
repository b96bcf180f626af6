#pragma once

#include <span>
#include <vector>

#include "kropina/basegeom.hpp"
#include "kropina/hvector.hpp"
#include "kropina/metric.hpp"
#include "kropina/rng.hpp"
#include "kropina/runner.hpp"

// Shared scaffolding for the unit tests: admissible random points on a
// metric and fully built (base, connection, one-form) bundles.
namespace kropina::testing {

inline std::span<const double> sp(const Vec<double>& v) {
  return {v.a.data(), static_cast<size_t>(v.n)};
}

struct PointBundle {
  Vec<double> x, y;
  BaseGeometry<double> base;
  ConnectionData<double> conn;
};

// Draws x in [-0.4, 0.4]^n and y on the unit sphere until L > 0, then builds
// the base objects and connection (with the Berwald block).
inline PointBundle admissible_point(const MetricSpec& metric, Rng& rng,
                                    bool with_berwald = true) {
  const int n = metric.dim();
  for (int attempt = 0; attempt < 64; ++attempt) {
    PointBundle p;
    p.x = Vec<double>(n);
    p.y = Vec<double>(n);
    for (int i = 0; i < n; ++i) p.x[i] = rng.uniform(-0.4, 0.4);
    Vec<double> dir = rng.sphere_dir(n);
    for (int i = 0; i < n; ++i) p.y[i] = dir[i];
    try {
      p.base = base_objects<double>(metric, sp(p.x), sp(p.y));
      p.conn = connection(metric, sp(p.x), sp(p.y), p.base, with_berwald);
      return p;
    } catch (const DomainError&) {
      continue;
    }
  }
  throw DomainError("admissible_point: no admissible draw in 64 attempts");
}

struct Instance {
  PointBundle pt;
  HVectorSpec spec;
  HVectorState state;
};

inline Instance generic_instance(const MetricSpec& metric, Rng& rng) {
  Instance inst;
  inst.pt = admissible_point(metric, rng);
  inst.spec = random_generic_spec(rng, inst.pt.base);
  inst.state = build_state(inst.pt.base, inst.pt.conn, inst.spec,
                           sp(inst.pt.x), sp(inst.pt.y));
  return inst;
}

inline Instance parallel_instance(const MetricSpec& metric, Rng& rng) {
  Instance inst;
  inst.pt = admissible_point(metric, rng);
  inst.spec = random_parallel_spec(rng, inst.pt.base);
  inst.state = build_state(inst.pt.base, inst.pt.conn, inst.spec,
                           sp(inst.pt.x), sp(inst.pt.y));
  return inst;
}

}  // namespace kropina::testing
