#include <benchmark/benchmark.h>

#include "kropina/basegeom.hpp"
#include "kropina/difftensor.hpp"
#include "kropina/kropina.hpp"
#include "kropina/metric.hpp"
#include "kropina/projective.hpp"
#include "kropina/rng.hpp"
#include "kropina/runner.hpp"

namespace {

using namespace kropina;

const MetricSpec& metric() { return find_metric("randers-bump-3"); }

const double kX[3] = {0.11, -0.23, 0.31};
const double kY[3] = {0.62, 0.41, -0.27};

std::span<const double> xs() { return {kX, 3}; }
std::span<const double> ys() { return {kY, 3}; }

HVectorSpec generic_spec(const BaseGeometry<double>& bg) {
  Rng rng(42);
  return random_generic_spec(rng, bg);
}

void BM_EvalJet_Randers(benchmark::State& state) {
  const MetricSpec& m = metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(eval_jet(m, xs(), ys()));
}
BENCHMARK(BM_EvalJet_Randers);

void BM_BaseObjects(benchmark::State& state) {
  const MetricSpec& m = metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(base_objects<double>(m, xs(), ys()));
}
BENCHMARK(BM_BaseObjects);

void BM_Connection(benchmark::State& state) {
  const MetricSpec& m = metric();
  BaseGeometry<double> bg = base_objects<double>(m, xs(), ys());
  for (auto _ : state)
    benchmark::DoNotOptimize(connection_from(bg));
}
BENCHMARK(BM_Connection);

void BM_Berwald(benchmark::State& state) {
  const MetricSpec& m = metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(berwald(m, xs(), ys()));
}
BENCHMARK(BM_Berwald);

void BM_StarClosedForm(benchmark::State& state) {
  const MetricSpec& m = metric();
  BaseGeometry<double> bg = base_objects<double>(m, xs(), ys());
  ConnectionData<double> conn = connection_from(bg);
  HVectorSpec spec = generic_spec(bg);
  HVectorState h = build_state(bg, conn, spec, xs(), ys());
  for (auto _ : state)
    benchmark::DoNotOptimize(star_closed_form(bg, h));
}
BENCHMARK(BM_StarClosedForm);

void BM_StarOracle(benchmark::State& state) {
  const MetricSpec& m = metric();
  BaseGeometry<double> bg = base_objects<double>(m, xs(), ys());
  ConnectionData<double> conn = connection_from(bg);
  HVectorSpec spec = generic_spec(bg);
  HVectorState h = build_state(bg, conn, spec, xs(), ys());
  for (auto _ : state)
    benchmark::DoNotOptimize(star_oracle(bg, h));
}
BENCHMARK(BM_StarOracle);

void BM_DiffTensorAssemble(benchmark::State& state) {
  const MetricSpec& m = metric();
  BaseGeometry<double> bg = base_objects<double>(m, xs(), ys());
  ConnectionData<double> conn = connection_from(bg);
  HVectorSpec spec = generic_spec(bg);
  HVectorState h = build_state(bg, conn, spec, xs(), ys());
  StarGeometry star = star_closed_form(bg, h);
  for (auto _ : state)
    benchmark::DoNotOptimize(difference_tensor(bg, h, star));
}
BENCHMARK(BM_DiffTensorAssemble);

void BM_GeodesicStep(benchmark::State& state) {
  const MetricSpec& m = metric();
  BaseGeometry<double> bg = base_objects<double>(m, xs(), ys());
  Rng rng(7);
  HVectorSpec spec = random_projective_spec(rng, bg);
  HVectorSource source;
  source.generate = [spec](const BaseGeometry<double>&,
                           const ConnectionData<double>&) { return spec; };
  for (auto _ : state)
    benchmark::DoNotOptimize(
        geodesic_compare(m, source, xs(), ys(), 1, 1e-3));
}
BENCHMARK(BM_GeodesicStep);

}  // namespace

BENCHMARK_MAIN();
