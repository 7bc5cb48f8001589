// Serial reference against the OpenMP kernels. The first argument of each
// parallel case is the thread count; serial cases ignore it.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "bandit_forge/coverage.hpp"
#include "bandit_forge/policies.hpp"
#include "bandit_forge/resampling.hpp"
#include "bandit_forge/simulator.hpp"
#include "support.hpp"

using namespace bforge;

namespace {

ArmHistory arm_history(std::size_t n, std::size_t dim, std::uint64_t seed) {
  RngStream rng(seed, 1);
  const auto beta = testing::random_dense(rng, dim, 0.5);
  ArmHistory h(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = testing::random_dense(rng, dim);
    double z = -0.5;
    for (std::size_t j = 0; j < dim; ++j) z += beta[j] * x[j];
    h.add(Context::dense(x), rng.bernoulli(1.0 / (1.0 + std::exp(-z))) ? 1 : 0);
  }
  return h;
}

void refit_resamples_case(benchmark::State& state, Exec exec) {
  const auto h = arm_history(2000, 40, 3);
  const int threads = static_cast<int>(state.range(0));
  omp_set_num_threads(threads);
  for (auto _ : state) {
    RngStream rng(1, 2);
    benchmark::DoNotOptimize(refit_resamples(h, 10, 1.0, rng, {}, exec));
  }
}

void ucb_select_case(benchmark::State& state, Exec exec) {
  constexpr std::size_t k = 64, dim = 200;
  omp_set_num_threads(static_cast<int>(state.range(0)));
  PolicyConfig c;
  c.kind = PolicyKind::BootstrappedUCB;
  c.label = "bench";
  c.n_arms = k;
  c.exec = exec;
  Policy p(c, dim, RngStream(2, 2));
  RngStream rng(2, 3);
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<OracleModel> models;
    for (int s = 0; s < 10; ++s) {
      OracleModel m = OracleModel::zero(dim, 1.0);
      m.weights = testing::random_dense(rng, dim, 0.1);
      m.fitted = true;
      models.push_back(std::move(m));
    }
    p.set_models(a, std::move(models), 5, 5);
  }
  const Context x = Context::dense(testing::random_dense(rng, dim));
  for (auto _ : state) {
    const Decision d = p.select(x);
    p.update(x, d.arm, 0);
  }
}

void coverage_case(benchmark::State& state, bool parallel) {
  CoverageConfig cfg;
  cfg.sample_sizes = {500};
  cfg.n_samples = 16;
  cfg.n_test = 500;
  cfg.jobs = static_cast<int>(state.range(0));
  const auto spec = logistic_independent_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? run_coverage(spec, cfg) : run_coverage_serial(spec, cfg));
  }
}

void experiment_case(benchmark::State& state) {
  const auto ds = testing::synthetic_multilabel(1500, 30, 20, 4, 8, 1.0);
  SimConfig sim;
  sim.n_runs = 4;
  sim.jobs = static_cast<int>(state.range(0));
  const std::vector<PolicyConfig> pols{[] {
    PolicyConfig c;
    c.kind = PolicyKind::BootstrappedTS;
    c.label = "ts";
    return c;
  }()};
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(ds, pols, sim));
}

}  // namespace

BENCHMARK_CAPTURE(refit_resamples_case, serial, Exec::Serial)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(refit_resamples_case, parallel, Exec::Parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(ucb_select_case, serial, Exec::Serial)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(ucb_select_case, parallel, Exec::Parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(coverage_case, serial, false)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(coverage_case, parallel, true)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(experiment_case)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
