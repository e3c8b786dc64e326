// Microbenchmarks for the quadrature-heavy paths. The optimizer cost is
// dominated by coverage evaluations, so regressions here show up directly in
// table reproduction time.

#include <benchmark/benchmark.h>

#include <vector>

#include "scadci/metrics.hpp"
#include "scadci/stats.hpp"

using namespace scadci;

namespace {

const ProblemConfig& cfg200() {
  static const ProblemConfig cfg = ProblemConfig::make(200, 0.05, 1.0);
  return cfg;
}

const ProblemConfig& cfg3() {
  static const ProblemConfig cfg = ProblemConfig::make(3, 0.05, 2.0);
  return cfg;
}

const SplineHalfWidth& spline200() {
  static const SplineHalfWidth s = [] {
    std::vector<double> v = {2.2, 2.1, 2.3, 1.9, 2.0};
    return spline_fit(v, cfg200(), 6);
  }();
  return s;
}

const SplineHalfWidth& spline3() {
  static const SplineHalfWidth s = [] {
    std::vector<double> v = {3.5, 3.0, 2.8, 3.3};
    return spline_fit(v, cfg3(), 5);
  }();
  return s;
}

const QuadratureSettings kQs{};

}  // namespace

static void BM_coverage_m200(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(coverage(1.5, spline200(), cfg200(), kQs));
  }
}
BENCHMARK(BM_coverage_m200);

static void BM_coverage_m3(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(coverage(1.5, spline3(), cfg3(), kQs));
  }
}
BENCHMARK(BM_coverage_m3);

static void BM_sel_m200(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sel(0.5, spline200(), cfg200(), kQs));
  }
}
BENCHMARK(BM_sel_m200);

static void BM_sel_at_zero_m200(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sel_at_zero(spline200(), cfg200(), kQs));
  }
}
BENCHMARK(BM_sel_at_zero_m200);

static void BM_integrate_normal_pdf(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        integrate([](double x) { return normal_pdf(x); }, -6.0, 6.0, kQs));
  }
}
BENCHMARK(BM_integrate_normal_pdf);

static void BM_cp_inner_subcase_a(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cp_inner(1.2, 0.8, spline3(), cfg3(), kQs));
  }
}
BENCHMARK(BM_cp_inner_subcase_a);

BENCHMARK_MAIN();
