#include "bandit_forge/resampling.hpp"

#include "bandit_forge/errors.hpp"

namespace bforge {

std::string_view scheme_name(WeightScheme scheme) noexcept {
  switch (scheme) {
    case WeightScheme::FullBootstrap: return "bootstrap";
    case WeightScheme::PoissonCounts: return "poisson";
    case WeightScheme::UniformWeights: return "uniform";
    case WeightScheme::Gamma11Weights: return "gamma11";
    case WeightScheme::Gamma22Weights: return "gamma22";
  }
  return "?";
}

std::optional<WeightScheme> parse_scheme(std::string_view name) noexcept {
  for (WeightScheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<std::size_t> draw_resample_indices(std::size_t n, RngStream& rng) {
  if (n == 0) throw EmptyPool("draw_resample_indices: empty pool");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.uniform_index(n);
  return idx;
}

double draw_weight(WeightScheme scheme, RngStream& rng) {
  switch (scheme) {
    case WeightScheme::PoissonCounts: return static_cast<double>(rng.poisson(1.0));
    case WeightScheme::UniformWeights: return rng.uniform_pos();
    case WeightScheme::Gamma11Weights: return rng.gamma(1.0, 1.0);
    case WeightScheme::Gamma22Weights: return rng.gamma(2.0, 2.0);
    case WeightScheme::FullBootstrap: break;
  }
  throw SchemeMismatch("draw_weight: FullBootstrap has no per-observation weight");
}

namespace {

std::vector<double> draw_once(WeightScheme scheme, std::size_t n, RngStream& rng) {
  std::vector<double> mult(n, 0.0);
  if (scheme == WeightScheme::FullBootstrap) {
    for (std::size_t i : draw_resample_indices(n, rng)) mult[i] += 1.0;
  } else {
    for (double& w : mult) w = draw_weight(scheme, rng);
  }
  return mult;
}

bool two_class(std::span<const double> mult, std::span<const std::uint8_t> labels) {
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < mult.size(); ++i) {
    if (mult[i] > 0.0) (labels[i] ? pos : neg) = true;
    if (pos && neg) return true;
  }
  return false;
}

}  // namespace

std::vector<double> draw_row_multipliers(WeightScheme scheme, std::size_t n, RngStream& rng,
                                         std::span<const std::uint8_t> labels) {
  if (n == 0) throw EmptyPool("draw_row_multipliers: empty pool");
  if (labels.empty()) return draw_once(scheme, n, rng);
  if (labels.size() != n) throw LengthMismatch("draw_row_multipliers: label count != n");
  for (int attempt = 0; attempt < kMaxResampleRedraws; ++attempt) {
    auto mult = draw_once(scheme, n, rng);
    if (two_class(mult, labels)) return mult;
  }
  return std::vector<double>(n, 1.0);
}

std::vector<OracleModel> refit_resamples(const ArmHistory& history, std::size_t m, double l2_lambda,
                                         RngStream& rng, std::span<const OracleModel> warm,
                                         Exec exec) {
  if (!history.two_class()) throw OneClassData("refit_resamples: history is one-class");
  if (m == 0) throw InvalidArgument("refit_resamples: m must be >= 1");
  if (!warm.empty() && warm.size() != m) throw LengthMismatch("refit_resamples: warm-start count != m");
  const std::uint64_t epoch = rng.next_u64();
  std::vector<OracleModel> models(m);
  for_each_index(m, exec, [&](std::size_t s) {
    RngStream stream(rng.seed(), hash_ids(rng.stream_id(), epoch, s));
    const auto mult = draw_row_multipliers(WeightScheme::FullBootstrap, history.size(), stream,
                                           history.rewards());
    std::vector<double> w(history.weights().begin(), history.weights().end());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= mult[i];
    FitOptions opts;
    if (!warm.empty()) opts.warm_start = &warm[s];
    models[s] = fit_weighted(history.contexts(), history.rewards(), w, history.dim(), l2_lambda, opts);
  });
  return models;
}

}  // namespace bforge
