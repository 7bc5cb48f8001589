#include "bandit_forge/coverage.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "bandit_forge/context.hpp"
#include "bandit_forge/errors.hpp"
#include "bandit_forge/oracle.hpp"
#include "bandit_forge/stats.hpp"

namespace bforge {

GeneratorSpec linear_large_bias_spec() {
  GeneratorSpec s;
  s.kind = ModelKind::Linear;
  s.coef = {1.05, -2.35, 0.15};
  s.bias = 8.0;
  s.mean = {0.0, 0.0, 0.0};
  s.sd = {1.0, 1.0, 1.0};
  s.noise_sd = 1.0;
  return s;
}

GeneratorSpec logistic_independent_spec() {
  GeneratorSpec s;
  s.kind = ModelKind::Logistic;
  s.coef = {1.05, -2.35, 0.15};
  s.bias = -2.0;
  s.mean = {0.0, 0.0, 0.0};
  s.sd = {0.5, 0.5, 0.5};
  s.noise_sd = 0.5;
  return s;
}

GeneratorSpec logistic_correlated_spec() {
  GeneratorSpec s = logistic_independent_spec();
  s.sd.clear();
  s.cov = {3.17, -1.08, -2.19,  //
           -1.08, 2.23, 1.10,   //
           -2.19, 1.10, 1.63};
  return s;
}

namespace {

constexpr double kLogisticL2 = 1e-6;

// Lower-triangular-ish factor A with A A^T = cov (from the eigendecomposition,
// so PSD-but-singular covariances are accepted).
Eigen::MatrixXd feature_factor(const GeneratorSpec& spec) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  if (spec.mean.size() != spec.dim()) throw InvalidArgument("generator: mean length != coefficient count");
  if (spec.cov.empty()) {
    if (spec.sd.size() != spec.dim()) throw InvalidArgument("generator: sd length != coefficient count");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (spec.sd[static_cast<std::size_t>(j)] < 0.0) throw InvalidArgument("generator: negative sd");
      a(j, j) = spec.sd[static_cast<std::size_t>(j)];
    }
    return a;
  }
  if (spec.cov.size() != spec.dim() * spec.dim()) {
    throw DimensionMismatch("generator: covariance must be dim x dim");
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> cov(
      spec.cov.data(), d, d);
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw CovarianceNotPSD("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd vals = eig.eigenvalues();
  if (vals.minCoeff() < -1e-10 * scale) throw CovarianceNotPSD("covariance matrix has a negative eigenvalue");
  return eig.eigenvectors() * vals.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

DataSet draw_features(const GeneratorSpec& spec, std::size_t n, RngStream& rng) {
  if (n == 0) throw InvalidArgument("generator: n must be >= 1");
  const Eigen::MatrixXd a = feature_factor(spec);
  const std::size_t d = spec.dim();
  DataSet ds;
  ds.dim = d;
  ds.x.resize(n * d);
  ds.y.resize(n);
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) z(static_cast<Eigen::Index>(j)) = rng.normal();
    const Eigen::VectorXd x = a * z;
    for (std::size_t j = 0; j < d; ++j) ds.x[i * d + j] = spec.mean[j] + x(static_cast<Eigen::Index>(j));
  }
  return ds;
}

double linear_score(const GeneratorSpec& spec, std::span<const double> x) {
  double s = spec.bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += spec.coef[j] * x[j];
  return s;
}

std::vector<Context> as_contexts(const DataSet& ds) {
  std::vector<Context> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(Context::dense(ds.row(i)));
  return out;
}

// Weighted least squares with intercept; minimum-norm solution when the
// resample is rank deficient.
std::vector<double> fit_linear(const DataSet& s, std::span<const double> w) {
  const auto n = static_cast<Eigen::Index>(s.size());
  const auto d = static_cast<Eigen::Index>(s.dim);
  Eigen::MatrixXd a(n, d + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = sw * s.x[static_cast<std::size_t>(i * d + j)];
    a(i, d) = sw;
    b(i) = sw * s.y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = a.completeOrthogonalDecomposition().solve(b);
  return std::vector<double>(beta.data(), beta.data() + beta.size());
}

}  // namespace

DataSet gen_sample(const GeneratorSpec& spec, std::size_t n, RngStream& rng) {
  DataSet ds = draw_features(spec, n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double score = linear_score(spec, ds.row(i)) + spec.noise_sd * rng.normal();
    ds.y[i] = spec.kind == ModelKind::Linear ? score : (rng.uniform() < logistic(score) ? 1.0 : 0.0);
  }
  return ds;
}

DataSet gen_test_set(const GeneratorSpec& spec, std::size_t n, RngStream& rng) {
  DataSet ds = draw_features(spec, n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double score = linear_score(spec, ds.row(i));
    ds.y[i] = spec.kind == ModelKind::Linear ? score : logistic(score);
  }
  return ds;
}

std::vector<double> estimate_bounds(const GeneratorSpec& spec, const DataSet& sample,
                                    WeightScheme scheme, std::size_t n_resamples, double pct,
                                    const DataSet& test, RngStream& rng) {
  if (sample.size() < 2) throw InvalidArgument("estimate_bounds: sample needs at least 2 rows");
  if (n_resamples < 1) throw InvalidArgument("estimate_bounds: n_resamples must be >= 1");
  if (sample.dim != spec.dim() || test.dim != spec.dim()) {
    throw DimensionMismatch("estimate_bounds: data dimension does not match the generator");
  }
  const std::size_t n = sample.size();
  std::vector<std::vector<double>> preds(test.size(), std::vector<double>(n_resamples));

  if (spec.kind == ModelKind::Linear) {
    for (std::size_t r = 0; r < n_resamples; ++r) {
      const auto w = draw_row_multipliers(scheme, n, rng);
      const auto beta = fit_linear(sample, w);
      for (std::size_t t = 0; t < test.size(); ++t) {
        const auto x = test.row(t);
        double v = beta[sample.dim];
        for (std::size_t j = 0; j < sample.dim; ++j) v += beta[j] * x[j];
        preds[t][r] = v;
      }
    }
  } else {
    const auto xs = as_contexts(sample);
    const auto test_xs = as_contexts(test);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = sample.y[i] > 0.5 ? 1 : 0;
    bool pos = false;
    bool neg = false;
    for (auto l : labels) (l ? pos : neg) = true;
    if (!pos || !neg) throw OneClassData("estimate_bounds: sample holds a single class");
    for (std::size_t r = 0; r < n_resamples; ++r) {
      const auto w = draw_row_multipliers(scheme, n, rng, labels);
      const OracleModel m = fit_weighted(xs, labels, w, sample.dim, kLogisticL2);
      for (std::size_t t = 0; t < test.size(); ++t) preds[t][r] = predict_proba(m, test_xs[t]);
    }
  }

  std::vector<double> bounds(test.size());
  for (std::size_t t = 0; t < test.size(); ++t) bounds[t] = percentile_inplace(preds[t], pct);
  return bounds;
}

double coverage_proportion(std::span<const double> bounds, std::span<const double> truth) {
  if (bounds.size() != truth.size()) throw LengthMismatch("coverage_proportion: length mismatch");
  if (bounds.empty()) throw InvalidArgument("coverage_proportion: empty test set");
  std::size_t below = 0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (truth[i] < bounds[i]) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(bounds.size());
}

std::vector<std::size_t> CoverageConfig::default_sample_sizes() {
  return {10, 15, 25, 39, 63, 100, 158, 251, 398, 630, 1000, 1584, 2511, 3981, 6309, 10000};
}

void CoverageConfig::validate() const {
  if (sample_sizes.empty()) throw InvalidArgument("sizes: at least one sample size required");
  for (auto s : sample_sizes) {
    if (s < 2) throw InvalidArgument("sizes: every sample size must be >= 2");
  }
  if (schemes.empty()) throw InvalidArgument("schemes: at least one scheme required");
  if (n_samples < 1) throw InvalidArgument("n-samples: must be >= 1");
  if (n_resamples < 1) throw InvalidArgument("resamples: must be >= 1");
  if (!(percentile >= 0.0 && percentile <= 100.0)) throw InvalidArgument("percentile: must lie in [0, 100]");
  if (n_test < 1) throw InvalidArgument("n-test: must be >= 1");
  if (jobs < 1) throw InvalidArgument("jobs: must be >= 1");
}

namespace {

// proportions[size][scheme][sample]
using Proportions = std::vector<std::vector<std::vector<double>>>;

void one_sample(const GeneratorSpec& spec, const CoverageConfig& cfg, const DataSet& test,
                std::size_t size_idx, std::size_t sample_idx, Proportions& out) {
  const std::size_t n = cfg.sample_sizes[size_idx];
  RngStream rng(cfg.seed, hash_ids(hash_name("coverage_sample"), size_idx, sample_idx));
  DataSet sample = gen_sample(spec, n, rng);
  if (spec.kind == ModelKind::Logistic) {
    auto one_class = [](const DataSet& s) {
      bool pos = false;
      bool neg = false;
      for (double y : s.y) (y > 0.5 ? pos : neg) = true;
      return !(pos && neg);
    };
    while (one_class(sample)) sample = gen_sample(spec, n, rng);
  }
  for (std::size_t j = 0; j < cfg.schemes.size(); ++j) {
    RngStream srng = rng.derive(static_cast<std::uint64_t>(cfg.schemes[j]));
    const auto bounds = estimate_bounds(spec, sample, cfg.schemes[j], cfg.n_resamples, cfg.percentile, test, srng);
    out[size_idx][j][sample_idx] = coverage_proportion(bounds, test.y);
  }
}

std::vector<CoverageCell> summarize(const CoverageConfig& cfg, const Proportions& props) {
  std::vector<CoverageCell> cells;
  for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
    for (std::size_t j = 0; j < cfg.schemes.size(); ++j) {
      cells.push_back({cfg.sample_sizes[i], cfg.schemes[j], mean(props[i][j]), stddev(props[i][j])});
    }
  }
  return cells;
}

std::vector<CoverageCell> coverage_impl(const GeneratorSpec& spec, const CoverageConfig& cfg, Exec exec) {
  cfg.validate();
  RngStream test_rng(cfg.seed, hash_name("coverage_test_set"));
  const DataSet test = gen_test_set(spec, cfg.n_test, test_rng);
  Proportions props(cfg.sample_sizes.size(),
                    std::vector<std::vector<double>>(cfg.schemes.size(), std::vector<double>(cfg.n_samples)));
  const std::size_t jobs = cfg.sample_sizes.size() * cfg.n_samples;
  // Largest sizes first so the dynamic schedule balances.
  for_each_index(
      jobs, exec,
      [&](std::size_t k) {
        const std::size_t size_idx = cfg.sample_sizes.size() - 1 - k / cfg.n_samples;
        one_sample(spec, cfg, test, size_idx, k % cfg.n_samples, props);
      },
      cfg.jobs);
  return summarize(cfg, props);
}

}  // namespace

std::vector<CoverageCell> run_coverage(const GeneratorSpec& spec, const CoverageConfig& cfg) {
  return coverage_impl(spec, cfg, cfg.exec);
}

std::vector<CoverageCell> run_coverage_serial(const GeneratorSpec& spec, const CoverageConfig& cfg) {
  return coverage_impl(spec, cfg, Exec::Serial);
}

}  // namespace bforge
