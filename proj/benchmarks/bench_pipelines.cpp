#include <benchmark/benchmark.h>

#include "opshift/calculus.hpp"
#include "opshift/dilation.hpp"
#include "opshift/doi.hpp"
#include "opshift/operators.hpp"
#include "opshift/ssf.hpp"

using namespace opshift;

namespace {

Matrix contraction(int n, std::uint64_t seed) {
  return random_ensemble(OperatorKind::Contraction, n, seed);
}

void BM_PoissonDensity(benchmark::State& state) {
  const Matrix t = contraction(static_cast<int>(state.range(0)), 1);
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(poisson_density(t, theta));
    theta += 1e-3;
  }
}
BENCHMARK(BM_PoissonDensity)->Arg(4)->Arg(8)->Arg(16);

void BM_SemiSpectralMeasure(benchmark::State& state) {
  const Matrix t = contraction(6, 2);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(semi_spectral_measure(t, grid));
  }
}
BENCHMARK(BM_SemiSpectralMeasure)->Arg(512)->Arg(2048);

void BM_PowerDilation(benchmark::State& state) {
  const Matrix t = contraction(4, 3);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_dilation(t, order));
  }
}
BENCHMARK(BM_PowerDilation)->Arg(4)->Arg(16);

void BM_ContractionSsf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix t0 = contraction(n, 4);
  const Matrix t1 = contraction(n, 5);
  QuadratureSpec spec;
  spec.tNodes = 32;
  spec.thetaGrid = 512;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssf_contraction_pair(t0, t1, spec));
  }
}
BENCHMARK(BM_ContractionSsf)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_UnitarySsf(benchmark::State& state) {
  const Matrix u0 = random_ensemble(OperatorKind::Unitary, 6, 6);
  const Matrix u1 = random_ensemble(OperatorKind::Unitary, 6, 7);
  QuadratureSpec spec;
  spec.pathSteps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssf_unitary_pair(u0, u1, spec));
  }
}
BENCHMARK(BM_UnitarySsf)->Arg(400)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_DoiSemispectral(benchmark::State& state) {
  const Matrix t1 = contraction(5, 8);
  const Matrix t0 = contraction(5, 9);
  const LaurentPoly f(0, {Complex(0.0), Complex(1.0), Complex(0.5),
                          Complex(0.0), Complex(-0.25)});
  const Matrix q = t1 - t0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(doi_semispectral(f, t1, t0, q));
  }
}
BENCHMARK(BM_DoiSemispectral);

void BM_DoiTrace(benchmark::State& state) {
  const Matrix t = contraction(5, 12);
  const Matrix k = contraction(5, 13);
  const LaurentPoly f(0, {Complex(0.0), Complex(1.0), Complex(0.5),
                          Complex(0.0), Complex(-0.25)});
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(doi_trace(f, t, k, grid));
  }
}
BENCHMARK(BM_DoiTrace)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_LipschitzDifference(benchmark::State& state) {
  const Matrix t1 = contraction(6, 10);
  const Matrix t0 = contraction(6, 11);
  const LaurentPoly f(0, {Complex(0.0), Complex(1.0), Complex(0.0),
                          Complex(0.3), Complex(0.0), Complex(-0.2)});
  for (auto _ : state) {
    benchmark::DoNotOptimize(lipschitz_difference(f, t1, t0));
  }
}
BENCHMARK(BM_LipschitzDifference);

}  // namespace

BENCHMARK_MAIN();
