#include <benchmark/benchmark.h>

#include <cmath>

#include "effcon/dynamics.hpp"
#include "effcon/models.hpp"
#include "effcon/oracle.hpp"
#include "effcon/quadrature.hpp"

using namespace effcon;

namespace {

const ReducedState kCoherent10{0.0, 10.0, 0.0, 0.5, 0.0, 0.5};

void BM_BracketOfConstraints(benchmark::State& state) {
  const ConstraintSet cs = build_constraints(QuadraticPotential{1.0});
  const auto all = cs.all();
  for (auto _ : state) {
    for (const PolyExpr& a : all)
      for (const PolyExpr& b : all) benchmark::DoNotOptimize(bracket(a, b));
  }
}
BENCHMARK(BM_BracketOfConstraints)->Unit(benchmark::kMicrosecond);

void BM_ClosureReport(benchmark::State& state) {
  const ConstraintSet cs = build_constraints(QuadraticPotential{1.0});
  for (auto _ : state) benchmark::DoNotOptimize(closure_report(cs));
}
BENCHMARK(BM_ClosureReport)->Unit(benchmark::kMillisecond);

void BM_EffectiveRhs(benchmark::State& state) {
  const ModelSpec model = QuadraticPotential{0.5};
  ReducedState r{0.0, 1.0, -2.0, 0.6, 0.1, 0.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_rhs(model, r));
    r.q += 1e-12;
  }
}
BENCHMARK(BM_EffectiveRhs);

void BM_EffectiveRhsGeneric(benchmark::State& state) {
  const ModelSpec model = QuadraticPotential{0.5};
  const AlgebraContext ctx(1.0);
  const ReducedState r{0.0, 1.0, -2.0, 0.6, 0.1, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(effective_rhs_generic(model, r, ctx));
}
BENCHMARK(BM_EffectiveRhsGeneric)->Unit(benchmark::kMicrosecond);

void BM_IntegrateCoherent10(benchmark::State& state) {
  IntegratorOptions o;
  o.method = state.range(0) == 0 ? Method::fixed_rk4 : Method::adaptive_rk45;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(QuadraticPotential{0.0}, kCoherent10, {0.0, 50.0}, AlgebraContext(1.0), o));
  }
}
BENCHMARK(BM_IntegrateCoherent10)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OracleObservables(benchmark::State& state) {
  const FockVector f = FockVector::coherent(10.0 / std::sqrt(2.0), 1.0, 0.0);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(observables(f.evolve(t)));
    t += 0.1;
  }
}
BENCHMARK(BM_OracleObservables)->Unit(benchmark::kMicrosecond);

void BM_MassShellExpectation(benchmark::State& state) {
  double p = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqrt_mass_shell_expectation(p, 0.05, 1.0));
    p += 1e-9;
  }
}
BENCHMARK(BM_MassShellExpectation)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
