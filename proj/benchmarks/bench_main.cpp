#include <benchmark/benchmark.h>

#include <cmath>

#include "kannai/dilation.hpp"
#include "kannai/kernels.hpp"
#include "kannai/operators.hpp"
#include "kannai/pipeline.hpp"
#include "kannai/quadrature.hpp"

namespace ops = kannai::operators;
namespace kp = kannai::pipeline;
namespace kq = kannai::quadrature;
using kannai::Index;
using kannai::Vector;

namespace {

kp::SimulationProblem dirichlet_problem(int n) {
  kp::SimulationProblem p;
  p.factor = ops::build_heat_gradient_1d(n);
  p.u0 = Vector(n - 1);
  for (Index i = 0; i < n - 1; ++i) p.u0(i) = std::cos(2.0 * M_PI * (i + 1.0) / n);
  p.forcing = ops::dirichlet_boundary_forcing(n, 1.0, 1.0);
  p.T = 1.0;
  p.eps = 1e-6;
  return p;
}

void BM_DilationSpectrum(benchmark::State& state) {
  const auto factor = ops::build_heat_gradient_1d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto h = kannai::dilation::hermitian_dilation(factor);
    benchmark::DoNotOptimize(h.spectrum.eigenvalues);
  }
}
BENCHMARK(BM_DilationSpectrum)->Arg(16)->Arg(50)->Arg(128);

void BM_TrapezoidAssembly(benchmark::State& state) {
  const auto p = dirichlet_problem(static_cast<int>(state.range(0)));
  const auto plan = kq::build_trapezoid_grid(10.0, 800);
  const auto coeffs = kq::coefficients(plan, p.T, ops::TimeProfile::ConstantInS);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kp::assemble(p, plan, coeffs));
  }
}
BENCHMARK(BM_TrapezoidAssembly)->Arg(16)->Arg(50);

void BM_GaussLegendreReference(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(kq::gauss_legendre_reference(static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_GaussLegendreReference)->Arg(8)->Arg(26)->Arg(64);

void BM_KernelTail(benchmark::State& state) {
  kannai::kernels::KernelSpec spec{kannai::kernels::KernelKind::OptLCHS, 1.0, 1e-6,
                                   std::nullopt, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kannai::kernels::tail_epsilon(spec, 8.0));
  }
}
BENCHMARK(BM_KernelTail);

void BM_FullTheoremRun(benchmark::State& state) {
  kp::SimulationProblem p;
  p.factor = ops::build_heat_gradient_1d(static_cast<int>(state.range(0)));
  p.u0 = Vector::Ones(p.factor.cols());
  p.T = 1.0;
  p.eps = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kp::run(p, kp::RunRule::theorem_gl()));
  }
}
BENCHMARK(BM_FullTheoremRun)->Arg(8)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
