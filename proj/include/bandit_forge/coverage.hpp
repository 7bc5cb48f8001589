#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bandit_forge/parallel.hpp"
#include "bandit_forge/resampling.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge {

enum class ModelKind { Linear, Logistic };

/// Synthetic data generator for the upper-bound coverage study.
///
/// Features are Normal(mean, diag(sd^2)) when `cov` is empty, else
/// Normal(mean, cov) with `cov` row-major dim x dim. The linear score is
/// x.coef + bias + noise, noise ~ Normal(0, noise_sd); logistic targets are
/// Bernoulli(sigma(score)), so the noise sits inside the link.
struct GeneratorSpec {
  ModelKind kind = ModelKind::Linear;
  std::vector<double> coef;
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> cov;
  double noise_sd = 0.0;

  std::size_t dim() const noexcept { return coef.size(); }
};

/// Linear model, large bias, independent standard-normal features.
GeneratorSpec linear_large_bias_spec();
/// Logistic model, bias -2, independent features with sd 0.5.
GeneratorSpec logistic_independent_spec();
/// Logistic model, bias -2, correlated features.
GeneratorSpec logistic_correlated_spec();

/// Row-major n x dim features with one target or expected value per row.
struct DataSet {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(x).subspan(i * dim, dim); }
};

/// Draws n noisy observations. CovarianceNotPSD for an invalid covariance.
DataSet gen_sample(const GeneratorSpec& spec, std::size_t n, RngStream& rng);

/// Draws n feature rows with their noiseless expected values
/// (x.coef + bias, or its logistic transform).
DataSet gen_test_set(const GeneratorSpec& spec, std::size_t n, RngStream& rng);

/// Upper bound per test point: the `pct` percentile of n_resamples model
/// predictions, each model fit to the sample under `scheme`. Linear models
/// use weighted least squares; logistic ones the oracle fit with l2 = 1e-6
/// and one-class redraw. OneClassData if a logistic sample is one-class.
std::vector<double> estimate_bounds(const GeneratorSpec& spec, const DataSet& sample,
                                    WeightScheme scheme, std::size_t n_resamples, double pct,
                                    const DataSet& test, RngStream& rng);

/// Fraction of points whose true value is strictly below its bound.
double coverage_proportion(std::span<const double> bounds, std::span<const double> truth);

struct CoverageCell {
  std::size_t sample_size = 0;
  WeightScheme scheme = WeightScheme::FullBootstrap;
  double mean = 0.0;  // fraction in [0, 1]
  double std = 0.0;
};

struct CoverageConfig {
  std::vector<std::size_t> sample_sizes = default_sample_sizes();
  std::vector<WeightScheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::size_t n_samples = 100;
  std::size_t n_resamples = 10;
  double percentile = 80.0;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;
  int jobs = 1;
  Exec exec = Exec::Parallel;

  /// 10, 15, 25, ..., 10000: 16 points, geometric, as tabulated.
  static std::vector<std::size_t> default_sample_sizes();
  void validate() const;
};

/// Cells ordered by sample size, then scheme, as listed in the config.
/// Each sample is shared across schemes; logistic samples drawn one-class
/// are redrawn.
std::vector<CoverageCell> run_coverage(const GeneratorSpec& spec, const CoverageConfig& cfg);

/// Serial reference of run_coverage, kept for equivalence tests and the
/// benchmark.
std::vector<CoverageCell> run_coverage_serial(const GeneratorSpec& spec, const CoverageConfig& cfg);

}  // namespace bforge
