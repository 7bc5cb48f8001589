#include <doctest.h>

#include <cmath>
#include <limits>

#include "bandit_forge/coverage.hpp"
#include "bandit_forge/errors.hpp"
#include "bandit_forge/stats.hpp"

using namespace bforge;

namespace {

GeneratorSpec noiseless_linear() {
  GeneratorSpec s = linear_large_bias_spec();
  s.noise_sd = 0.0;
  return s;
}

}  // namespace

TEST_SUITE("coverage") {

TEST_CASE("presets") {
  const auto lin = linear_large_bias_spec();
  CHECK(lin.kind == ModelKind::Linear);
  CHECK(lin.coef == std::vector<double>{1.05, -2.35, 0.15});
  CHECK(lin.bias == 8.0);
  const auto ind = logistic_independent_spec();
  CHECK(ind.kind == ModelKind::Logistic);
  CHECK(ind.bias == -2.0);
  CHECK(ind.sd == std::vector<double>{0.5, 0.5, 0.5});
  const auto cor = logistic_correlated_spec();
  CHECK(cor.cov.size() == 9);
  RngStream rng(1, 1);
  CHECK_NOTHROW(gen_sample(cor, 10, rng));
}

TEST_CASE("generators") {
  RngStream rng(2, 2);
  const auto spec = noiseless_linear();
  const auto s = gen_sample(spec, 50, rng);
  REQUIRE(s.size() == 50);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.row(i);
    CHECK(s.y[i] == doctest::Approx(8.0 + 1.05 * x[0] - 2.35 * x[1] + 0.15 * x[2]).epsilon(1e-14));
  }

  GeneratorSpec flat = spec;
  flat.coef = {0.0, 0.0, 0.0};
  for (double y : gen_test_set(flat, 20, rng).y) CHECK(y == 8.0);
  GeneratorSpec half = logistic_independent_spec();
  half.coef = {0.0, 0.0, 0.0};
  half.bias = 0.0;
  for (double y : gen_test_set(half, 20, rng).y) CHECK(y == 0.5);
  for (double y : gen_sample(half, 50, rng).y) CHECK((y == 0.0 || y == 1.0));
}

TEST_CASE("feature moments follow the covariance") {
  const auto spec = logistic_correlated_spec();
  RngStream rng(3, 3);
  const auto s = gen_test_set(spec, 100000, rng);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      double m = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) m += (s.row(i)[a] - spec.mean[a]) * (s.row(i)[b] - spec.mean[b]);
      m /= static_cast<double>(s.size());
      CHECK(std::abs(m - spec.cov[a * 3 + b]) < 0.03);
    }
  }
}

TEST_CASE("invalid covariances are rejected") {
  RngStream rng(4, 4);
  GeneratorSpec s = logistic_correlated_spec();
  s.cov = {1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(gen_sample(s, 5, rng), CovarianceNotPSD);
  s.cov = {1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(gen_sample(s, 5, rng), CovarianceNotPSD);
  s.cov = {1.0, 0.0};
  CHECK_THROWS_AS(gen_sample(s, 5, rng), DimensionMismatch);
}

TEST_CASE("noise-free linear data pins every resample to the truth") {
  RngStream rng(5, 5);
  const auto spec = noiseless_linear();
  const auto sample = gen_sample(spec, 200, rng);
  const auto test = gen_test_set(spec, 50, rng);
  for (auto scheme : kAllSchemes) {
    const auto bounds = estimate_bounds(spec, sample, scheme, 10, 80.0, test, rng);
    for (std::size_t i = 0; i < test.size(); ++i) CHECK(bounds[i] == doctest::Approx(test.y[i]).epsilon(1e-9));
  }
}

TEST_CASE("bounds grow with the percentile") {
  const auto spec = logistic_independent_spec();
  RngStream rng(6, 6);
  const auto sample = gen_sample(spec, 300, rng);
  const auto test = gen_test_set(spec, 100, rng);
  for (auto scheme : kAllSchemes) {
    RngStream a(6, 7), b(6, 7), c(6, 7);
    const auto lo = estimate_bounds(spec, sample, scheme, 10, 20.0, test, a);
    const auto hi = estimate_bounds(spec, sample, scheme, 10, 80.0, test, b);
    const auto top = estimate_bounds(spec, sample, scheme, 10, 100.0, test, c);
    for (std::size_t i = 0; i < test.size(); ++i) {
      CHECK(lo[i] <= hi[i]);
      CHECK(hi[i] <= top[i]);
    }
  }
}

TEST_CASE("a single resample makes the percentile irrelevant") {
  const auto spec = logistic_independent_spec();
  RngStream rng(7, 7);
  const auto sample = gen_sample(spec, 200, rng);
  const auto test = gen_test_set(spec, 40, rng);
  RngStream a(7, 8), b(7, 8);
  CHECK(estimate_bounds(spec, sample, WeightScheme::Gamma22Weights, 1, 5.0, test, a) ==
        estimate_bounds(spec, sample, WeightScheme::Gamma22Weights, 1, 95.0, test, b));
}

TEST_CASE("estimate_bounds errors") {
  const auto spec = logistic_independent_spec();
  RngStream rng(8, 8);
  DataSet one_class{3, std::vector<double>(30, 0.1), std::vector<double>(10, 0.0)};
  const auto test = gen_test_set(spec, 5, rng);
  CHECK_THROWS_AS(estimate_bounds(spec, one_class, WeightScheme::FullBootstrap, 5, 80.0, test, rng), OneClassData);
  DataSet wrong{2, std::vector<double>(20, 0.1), std::vector<double>(10, 1.0)};
  CHECK_THROWS_AS(estimate_bounds(spec, wrong, WeightScheme::FullBootstrap, 5, 80.0, test, rng), DimensionMismatch);
  const auto sample = gen_sample(spec, 100, rng);
  CHECK_THROWS_AS(estimate_bounds(spec, sample, WeightScheme::FullBootstrap, 0, 80.0, test, rng), InvalidArgument);
}

TEST_CASE("coverage_proportion") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> truth{0.1, 0.5, 0.9, 0.3};
  CHECK(coverage_proportion(std::vector<double>(4, inf), truth) == 1.0);
  CHECK(coverage_proportion(truth, truth) == 0.0);
  CHECK(coverage_proportion(std::vector<double>{0.2, 0.2, 1.0, 0.3}, truth) == 0.5);
  // Order of test points does not matter.
  CHECK(coverage_proportion(std::vector<double>{0.3, 1.0, 0.2, 0.2}, std::vector<double>{0.3, 0.9, 0.5, 0.1}) == 0.5);
  CHECK_THROWS_AS(coverage_proportion(std::vector<double>{1.0}, truth), LengthMismatch);
  CHECK_THROWS_AS(coverage_proportion(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("run_coverage: shape and schedule independence") {
  CoverageConfig cfg;
  cfg.sample_sizes = {10, 2000};
  cfg.n_samples = 12;
  cfg.n_resamples = 5;
  cfg.n_test = 200;
  cfg.seed = 9;
  cfg.exec = Exec::Serial;
  const auto spec = logistic_independent_spec();
  const auto cells = run_coverage(spec, cfg);
  REQUIRE(cells.size() == 2 * 5);
  CHECK(cells[0].sample_size == 10);
  CHECK(cells[0].scheme == WeightScheme::FullBootstrap);
  CHECK(cells[9].sample_size == 2000);
  CHECK(cells[9].scheme == WeightScheme::Gamma22Weights);
  for (const auto& c : cells) {
    CHECK(c.mean >= 0.0);
    CHECK(c.mean <= 1.0);
  }

  cfg.exec = Exec::Parallel;
  cfg.jobs = 3;
  const auto par = run_coverage(spec, cfg);
  REQUIRE(par.size() == cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(par[i].mean == cells[i].mean);
    CHECK(par[i].std == cells[i].std);
  }
  const auto ser = run_coverage_serial(spec, cfg);
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(ser[i].mean == cells[i].mean);
}

TEST_CASE("config validation") {
  CoverageConfig cfg;
  CHECK(cfg.sample_sizes.size() == 16);
  CHECK(cfg.sample_sizes.front() == 10);
  CHECK(cfg.sample_sizes.back() == 10000);
  CHECK_NOTHROW(cfg.validate());
  cfg.n_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.sample_sizes = {1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.percentile = 101;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.schemes.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

}
