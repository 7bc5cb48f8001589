#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bandit_forge/context.hpp"

namespace bforge {

/// Per-arm accumulated covariates and binary rewards.
///
/// Stored column-wise so fits can view contexts, rewards, and weights as
/// spans. Counts are maintained on insertion; rows are append-only.
class ArmHistory {
 public:
  /// dim = 0 adopts the dimensionality of the first row added.
  explicit ArmHistory(std::size_t dim = 0) : dim_(dim) {}

  /// Throws DimensionMismatch, or InvalidArgument for a reward outside {0,1}
  /// or a non-positive weight.
  void add(Context x, int reward, double weight = 1.0);

  std::size_t size() const noexcept { return rewards_.size(); }
  bool empty() const noexcept { return rewards_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t n_pos() const noexcept { return n_pos_; }
  std::size_t n_neg() const noexcept { return n_neg_; }
  bool two_class() const noexcept { return n_pos_ > 0 && n_neg_ > 0; }

  std::span<const Context> contexts() const noexcept { return contexts_; }
  std::span<const std::uint8_t> rewards() const noexcept { return rewards_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::size_t dim_;
  std::vector<Context> contexts_;
  std::vector<std::uint8_t> rewards_;
  std::vector<double> weights_;
  std::size_t n_pos_ = 0;
  std::size_t n_neg_ = 0;
};

/// Fitted logistic-regression coefficients for one arm (or one resample).
struct OracleModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2_lambda = 0.0;
  bool fitted = false;
  /// Observations absorbed by online updates; scales the per-step penalty
  /// and drives the step-size schedule.
  std::uint64_t n_seen = 0;

  static OracleModel zero(std::size_t dim, double l2_lambda);

  std::size_t dim() const noexcept { return weights.size(); }
  /// w.x + b, no dimensionality check.
  double linear_score(const Context& x) const noexcept { return x.dot(weights) + bias; }

  friend bool operator==(const OracleModel&, const OracleModel&) = default;
};

struct Observation {
  Context x;
  int reward = 0;
  double weight = 1.0;
};

struct FitOptions {
  double grad_tol = 1e-8;
  int max_iter = 1000;
  /// Dense Newton is used when dim + 1 is at most this; L-BFGS above it.
  std::size_t newton_max_dim = 64;
  const OracleModel* warm_start = nullptr;
};

/// Objective value after each accepted optimizer iteration, starting with
/// the initial point.
struct FitTrace {
  std::vector<double> objective;
  double final_grad_norm = 0.0;
  int iterations = 0;
};

/// Weighted L2-regularized log-loss minimizer over an arm's full history.
///
/// Objective: sum_i w_i * logloss(r_i, w.x_i + b) + l2/2 * |w|^2, with the
/// bias left unregularized. Requires both reward classes (OneClassData)
/// and l2 > 0 (InvalidArgument).
OracleModel fit_full(const ArmHistory& history, double l2_lambda, const FitOptions& opts = {},
                     FitTrace* trace = nullptr);

/// Same objective over explicit columns. Rows whose weight is 0 are ignored;
/// l2 may be 0 here, but the data must then not be separable.
OracleModel fit_weighted(std::span<const Context> xs, std::span<const std::uint8_t> rewards,
                         std::span<const double> weights, std::size_t dim, double l2_lambda,
                         const FitOptions& opts = {}, FitTrace* trace = nullptr);

/// Value of the fit_full objective at `model`.
double objective(const OracleModel& model, std::span<const Context> xs,
                 std::span<const std::uint8_t> rewards, std::span<const double> weights);

/// One weighted SGD pass over `batch`, in order.
///
/// Each observation with positive weight increments n_seen and applies
///   w -= step * ((p - r) * weight * x + l2 * w / n_seen)
///   b -= step * (p - r) * weight
/// Zero-weight observations are skipped; any applied step marks the model
/// fitted, regardless of whether the batch held both classes.
OracleModel partial_fit(OracleModel model, std::span<const Observation> batch, double step_size);

/// In-place single-observation form of partial_fit.
void sgd_step(OracleModel& model, const Context& x, int reward, double weight, double step_size);

/// eta0 / (1 + eta0 * l2 * updates): the online step-size schedule.
double online_step_size(double eta0, double l2_lambda, std::uint64_t updates) noexcept;

/// sigma(w.x + b), or exactly 0.5 for an unfitted model.
double predict_proba(const OracleModel& model, const Context& x);

/// Norm of the unregularized per-observation log-loss gradient in
/// (weights, bias) for a hypothetical label: |p - r| * sqrt(|x|^2 + 1).
/// Unfitted models use the zero-model probability 0.5.
double grad_norm(const OracleModel& model, const Context& x, int hypothetical_label);

}  // namespace bforge
