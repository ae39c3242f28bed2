// Microbenchmarks for the main cost centers: phase evaluation, oscillatory
// field synthesis, kernel sampling, torus transforms and propagation, ratio
// cells, eikonal table construction, and power-law fitting.
#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <osclab/oscint/kernel.hpp>
#include <osclab/oscint/oscillatory.hpp>
#include <osclab/oscint/profile.hpp>
#include <osclab/phasekit/eikonal.hpp>
#include <osclab/phasekit/metric.hpp>
#include <osclab/phasekit/phase.hpp>
#include <osclab/scalefit/fit.hpp>
#include <osclab/toruslab/field.hpp>
#include <osclab/toruslab/multiplier.hpp>
#include <osclab/toruslab/ratios.hpp>

namespace {

using namespace osclab;

// --------------------------------------------------------------------------
// phasekit: pointwise phase data

void BM_ParaboloidMixedHess(benchmark::State& state) {
  const PhasePtr phase = make_paraboloid_phase(2);
  const Vec x = Vec::make(0.11, -0.23);
  const Vec xi = Vec::make(1.31, 0.67);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phase->mixed_hess(0.05, x, xi));
  }
}
BENCHMARK(BM_ParaboloidMixedHess);

void BM_ConeGradXi(benchmark::State& state) {
  const PhasePtr phase = make_cone_phase(2);
  const Vec x = Vec::make(0.11, -0.23);
  const Vec xi = Vec::make(1.31, 0.67);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phase->grad_xi(0.05, x, xi));
  }
}
BENCHMARK(BM_ConeGradXi);

// --------------------------------------------------------------------------
// oscint: field synthesis and the bilinear norm

struct OscSetup {
  PhasePtr phase_a, phase_b;
  Amplitude amp_a, amp_b;
  SpaceTimeGrid grid;
  FrequencyProfile prof_a, prof_b;
  double lambda, mu;

  OscSetup(double lam, double mu_in) : lambda(lam), mu(mu_in) {
    phase_a = make_paraboloid_phase(1);
    phase_b = make_paraboloid_phase(1);
    amp_a = make_amplitude(1, 0.0, Vec::make(0.0), Vec::make(1.5));
    amp_b = make_amplitude(1, 0.0, Vec::make(0.0), Vec::make(-1.5));
    const std::vector<OscFactor> factors = {{phase_a.get(), &amp_a, lambda},
                                            {phase_b.get(), &amp_b, mu}};
    grid = make_spacetime_grid(Interval{-0.125, 0.125},
                               {Interval{-0.125, 0.125}, Interval{}}, 1, factors);
    prof_a = sample_profile(make_frequency_grid(*phase_a, amp_a, lambda),
                            random_wave_mixture(7, 1));
    prof_b = sample_profile(make_frequency_grid(*phase_b, amp_b, mu),
                            random_wave_mixture(8, 1));
  }
};

void BM_OscillatoryField(benchmark::State& state) {
  OscSetup s(static_cast<double>(state.range(0)), 8.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        eval_oscillatory(*s.phase_a, s.amp_a, s.prof_a, s.lambda, s.grid, 1));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(s.grid.t_size() * s.grid.x_size()));
}
BENCHMARK(BM_OscillatoryField)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BilinearNorm(benchmark::State& state) {
  OscSetup s(static_cast<double>(state.range(0)), 8.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bilinear_L2_norm(*s.phase_a, s.amp_a, s.prof_a, s.lambda,
                                              *s.phase_b, s.amp_b, s.prof_b, s.mu,
                                              s.grid, 1));
  }
}
BENCHMARK(BM_BilinearNorm)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_KernelSample(benchmark::State& state) {
  const double lambda = 64.0, mu = 8.0;
  const PhasePtr pa = make_paraboloid_phase(1);
  const PhasePtr pb = make_paraboloid_phase(1);
  const Amplitude aa = make_amplitude(1, 0.0, Vec::make(0.0), Vec::make(1.5));
  const Amplitude ab = make_amplitude(1, 0.0, Vec::make(0.0), Vec::make(-1.0));
  const SpaceTimeGrid grid = make_kernel_grid(*pa, *pb, aa, ab, lambda, mu);
  const Vec zeta = Vec::make(1.45);
  const Vec xi = Vec::make(1.55);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernel_K(*pa, *pb, aa, ab, lambda, mu, zeta, -1.0, xi, -1.0, 0.0, grid));
  }
}
BENCHMARK(BM_KernelSample)->Unit(benchmark::kMillisecond);

// --------------------------------------------------------------------------
// toruslab: transforms, propagation, field draws, ratio cells

void BM_TorusTransform(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const TorusField f = make_band_field(1, modes, kTau, DyadicBand{32.0}, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_physical(f));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * modes);
}
BENCHMARK(BM_TorusTransform)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_TorusTransform2d(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const TorusField f = make_band_field(2, modes, kTau, DyadicBand{16.0}, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_physical(f));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * modes * modes);
}
BENCHMARK(BM_TorusTransform2d)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TorusPropagate(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const TorusField f = make_band_field(1, modes, kTau, DyadicBand{32.0}, 11);
  const FourierMultiplier flow = schrodinger_flow(1e-3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(f, flow));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * modes);
}
BENCHMARK(BM_TorusPropagate)->Arg(4096)->Arg(16384);

void BM_BandFieldDraw(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_band_field(2, 256, kTau, DyadicBand{16.0}, 11));
  }
}
BENCHMARK(BM_BandFieldDraw)->Unit(benchmark::kMillisecond);

void BM_BilinearRatioCell(benchmark::State& state) {
  RatioOptions opt;
  opt.trials = 1;
  opt.workers = 1;
  const double n1 = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bilinear_ratio(n1, 1.0, 1.0 / n1, 1, opt));
  }
}
BENCHMARK(BM_BilinearRatioCell)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

// --------------------------------------------------------------------------
// phasekit/eikonal: characteristic-table construction

void BM_EikonalSolve(benchmark::State& state) {
  const Metric metric = Metric::perturbed_circle(0.1, 2);
  EikonalGridSpec grid;
  grid.n_s = 17;
  grid.n_x = 33;
  grid.n_xi = 17;
  grid.rays = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_eikonal(metric, 0.25, Interval{0.5, 2.0}, grid));
  }
}
BENCHMARK(BM_EikonalSolve)->Unit(benchmark::kMillisecond);

// --------------------------------------------------------------------------
// scalefit

void BM_FitPowerLaw(benchmark::State& state) {
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < 512; ++i) {
    const double x = std::pow(2.0, 1.0 + i * 0.02);
    samples.emplace_back(x, 3.7 * std::pow(x, -0.5));
  }
  for (auto _ : state) {
    auto copy = samples;
    benchmark::DoNotOptimize(fit_power_law(std::move(copy)));
  }
}
BENCHMARK(BM_FitPowerLaw);

}  // namespace

BENCHMARK_MAIN();
