#include "bandit_forge/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "bandit_forge/errors.hpp"
#include "bandit_forge/stats.hpp"

namespace bforge {

void ArmHistory::add(Context x, int reward, double weight) {
  if (reward != 0 && reward != 1) throw InvalidArgument("ArmHistory: reward must be 0 or 1");
  if (!(weight > 0.0)) throw InvalidArgument("ArmHistory: weight must be > 0");
  if (dim_ == 0 && rewards_.empty()) dim_ = x.dim();
  if (x.dim() != dim_) {
    throw DimensionMismatch("ArmHistory: row has dimension " + std::to_string(x.dim()) +
                            ", expected " + std::to_string(dim_));
  }
  contexts_.push_back(std::move(x));
  rewards_.push_back(static_cast<std::uint8_t>(reward));
  weights_.push_back(weight);
  (reward == 1 ? n_pos_ : n_neg_) += 1;
}

OracleModel OracleModel::zero(std::size_t dim, double l2_lambda) {
  OracleModel m;
  m.weights.assign(dim, 0.0);
  m.l2_lambda = l2_lambda;
  return m;
}

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Parameters are packed as [weights..., bias].
class LogisticProblem {
 public:
  LogisticProblem(std::span<const Context> xs, std::span<const std::uint8_t> rewards,
                  std::span<const double> weights, std::size_t dim, double l2)
      : xs_(xs), rewards_(rewards), weights_(weights), dim_(dim), l2_(l2) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (weights[i] > 0.0) rows_.push_back(i);
    }
  }

  std::size_t n_params() const { return dim_ + 1; }
  std::span<const std::size_t> rows() const { return rows_; }

  double linear(std::span<const double> theta, std::size_t i) const {
    return xs_[i].dot(theta.first(dim_)) + theta[dim_];
  }

  // Objective value; fills grad when non-empty.
  double eval(std::span<const double> theta, std::span<double> grad) const {
    double f = 0.0;
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i : rows_) {
      const double z = linear(theta, i);
      const double w = weights_[i];
      const double r = rewards_[i];
      // softplus(z) - z == softplus(-z), without the cancellation for r = 1.
      f += w * (r > 0.0 ? softplus(-z) : softplus(z));
      if (!grad.empty()) {
        const double g = w * (logistic(z) - r);
        xs_[i].axpy_into(g, grad.first(dim_));
        grad[dim_] += g;
      }
    }
    double reg = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      reg += theta[j] * theta[j];
      if (!grad.empty()) grad[j] += l2_ * theta[j];
    }
    return f + 0.5 * l2_ * reg;
  }

  Eigen::MatrixXd hessian(std::span<const double> theta) const {
    const std::size_t n = n_params();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    const auto d = static_cast<Eigen::Index>(dim_);
    for (std::size_t i : rows_) {
      const double p = logistic(linear(theta, i));
      const double s = weights_[i] * p * (1.0 - p);
      const auto idx = xs_[i].indices();
      const auto val = xs_[i].values();
      for (std::size_t a = 0; a < idx.size(); ++a) {
        const auto ia = static_cast<Eigen::Index>(idx[a]);
        for (std::size_t b = 0; b <= a; ++b) {
          h(ia, static_cast<Eigen::Index>(idx[b])) += s * val[a] * val[b];
        }
        h(d, ia) += s * val[a];
      }
      h(d, d) += s;
    }
    for (Eigen::Index j = 0; j < d; ++j) h(j, j) += l2_;
    return h.selfadjointView<Eigen::Lower>();
  }

 private:
  std::span<const Context> xs_;
  std::span<const std::uint8_t> rewards_;
  std::span<const double> weights_;
  std::size_t dim_;
  double l2_;
  std::vector<std::size_t> rows_;
};

// Backtracking Armijo search along `dir`. Returns false when no step in
// [2^-60, 1] * t0 is acceptable.
bool line_search(const LogisticProblem& prob, std::vector<double>& theta, double& f,
                 std::vector<double>& grad, std::span<const double> dir, double t0) {
  constexpr double kArmijo = 1e-4;
  const double slope = dotv(grad, dir);
  if (!(slope < 0.0)) return false;
  std::vector<double> trial(theta.size());
  std::vector<double> trial_grad(theta.size());
  double t = t0;
  for (int k = 0; k < 60; ++k, t *= 0.5) {
    for (std::size_t j = 0; j < theta.size(); ++j) trial[j] = theta[j] + t * dir[j];
    const double ft = prob.eval(trial, {});
    if (!std::isfinite(ft)) continue;
    if (ft <= f + kArmijo * t * slope && ft < f) {
      theta.swap(trial);
      f = prob.eval(theta, trial_grad);
      grad.swap(trial_grad);
      return true;
    }
    // Near the optimum the predicted decrease drops below the rounding
    // noise of f and Armijo can no longer rank steps; accept a step that
    // shrinks the gradient and leaves f unchanged up to that noise.
    const double noise = 1e-12 * std::max(1.0, std::fabs(f));
    if (-t * slope <= noise && ft <= f + noise) {
      const double ft2 = prob.eval(trial, trial_grad);
      if (norm2(trial_grad) < norm2(grad)) {
        theta.swap(trial);
        f = ft2;
        grad.swap(trial_grad);
        return true;
      }
    }
  }
  return false;
}

void newton(const LogisticProblem& prob, std::vector<double>& theta, const FitOptions& opts,
            FitTrace* trace) {
  std::vector<double> grad(theta.size());
  double f = prob.eval(theta, grad);
  if (trace) trace->objective.push_back(f);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (norm2(grad) <= opts.grad_tol) break;
    const Eigen::MatrixXd h = prob.hessian(theta);
    const Eigen::Map<const Eigen::VectorXd> g(grad.data(), static_cast<Eigen::Index>(grad.size()));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    std::vector<double> dir(theta.size());
    bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
    if (ok) {
      const Eigen::VectorXd step = ldlt.solve(g);
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] = -step(static_cast<Eigen::Index>(j));
      ok = dotv(dir, grad) < 0.0 && std::all_of(dir.begin(), dir.end(),
                                                [](double v) { return std::isfinite(v); });
    }
    if (!ok) {
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] = -grad[j];
    }
    if (!line_search(prob, theta, f, grad, dir, 1.0)) break;
    if (trace) trace->objective.push_back(f);
  }
  if (trace) {
    trace->iterations = it;
    trace->final_grad_norm = norm2(grad);
  }
}

void lbfgs(const LogisticProblem& prob, std::vector<double>& theta, const FitOptions& opts,
           FitTrace* trace) {
  constexpr std::size_t kMemory = 10;
  const std::size_t n = theta.size();
  std::vector<double> grad(n);
  double f = prob.eval(theta, grad);
  if (trace) trace->objective.push_back(f);

  std::deque<std::vector<double>> s_hist;
  std::deque<std::vector<double>> y_hist;
  std::deque<double> rho_hist;
  std::vector<double> dir(n);
  std::vector<double> alpha(kMemory);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double gnorm = norm2(grad);
    if (gnorm <= opts.grad_tol) break;

    // Two-loop recursion.
    for (std::size_t j = 0; j < n; ++j) dir[j] = -grad[j];
    const std::size_t m = s_hist.size();
    for (std::size_t k = m; k-- > 0;) {
      alpha[k] = rho_hist[k] * dotv(s_hist[k], dir);
      for (std::size_t j = 0; j < n; ++j) dir[j] -= alpha[k] * y_hist[k][j];
    }
    if (m > 0) {
      const double gamma = dotv(s_hist.back(), y_hist.back()) / dotv(y_hist.back(), y_hist.back());
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * dotv(y_hist[k], dir);
      for (std::size_t j = 0; j < n; ++j) dir[j] += (alpha[k] - beta) * s_hist[k][j];
    }
    if (!(dotv(dir, grad) < 0.0)) {
      for (std::size_t j = 0; j < n; ++j) dir[j] = -grad[j];
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    const std::vector<double> prev_theta = theta;
    const std::vector<double> prev_grad = grad;
    const double t0 = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    if (!line_search(prob, theta, f, grad, dir, t0)) {
      if (s_hist.empty()) break;
      // Retry once from steepest descent with fresh memory.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n; ++j) dir[j] = -grad[j];
      if (!line_search(prob, theta, f, grad, dir, std::min(1.0, 1.0 / gnorm))) break;
    }
    if (trace) trace->objective.push_back(f);

    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = theta[j] - prev_theta[j];
      y[j] = grad[j] - prev_grad[j];
    }
    const double sy = dotv(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      if (s_hist.size() == kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
  }
  if (trace) {
    trace->iterations = it;
    trace->final_grad_norm = norm2(grad);
  }
}

void check_dims(std::span<const Context> xs, std::size_t dim) {
  for (const Context& x : xs) {
    if (x.dim() != dim) {
      throw DimensionMismatch("fit: row has dimension " + std::to_string(x.dim()) + ", expected " +
                              std::to_string(dim));
    }
  }
}

}  // namespace

OracleModel fit_weighted(std::span<const Context> xs, std::span<const std::uint8_t> rewards,
                         std::span<const double> weights, std::size_t dim, double l2_lambda,
                         const FitOptions& opts, FitTrace* trace) {
  if (xs.size() != rewards.size() || xs.size() != weights.size()) {
    throw LengthMismatch("fit: contexts, rewards and weights differ in length");
  }
  if (!(l2_lambda >= 0.0)) throw InvalidArgument("fit: l2_lambda must be >= 0");
  check_dims(xs, dim);
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (weights[i] < 0.0) throw InvalidArgument("fit: negative row weight");
    if (weights[i] > 0.0) (rewards[i] ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw OneClassData("fit: data contains a single reward class");

  const LogisticProblem prob(xs, rewards, weights, dim, l2_lambda);
  std::vector<double> theta(dim + 1, 0.0);
  if (opts.warm_start && opts.warm_start->fitted && opts.warm_start->dim() == dim) {
    std::copy(opts.warm_start->weights.begin(), opts.warm_start->weights.end(), theta.begin());
    theta[dim] = opts.warm_start->bias;
  }
  if (trace) *trace = FitTrace{};
  if (dim + 1 <= opts.newton_max_dim) {
    newton(prob, theta, opts, trace);
  } else {
    lbfgs(prob, theta, opts, trace);
  }

  OracleModel model;
  model.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(dim));
  model.bias = theta[dim];
  model.l2_lambda = l2_lambda;
  model.fitted = true;
  return model;
}

OracleModel fit_full(const ArmHistory& history, double l2_lambda, const FitOptions& opts,
                     FitTrace* trace) {
  if (!(l2_lambda > 0.0)) throw InvalidArgument("fit_full: l2_lambda must be > 0");
  if (!history.two_class()) throw OneClassData("fit_full: history contains a single reward class");
  return fit_weighted(history.contexts(), history.rewards(), history.weights(), history.dim(),
                      l2_lambda, opts, trace);
}

double objective(const OracleModel& model, std::span<const Context> xs,
                 std::span<const std::uint8_t> rewards, std::span<const double> weights) {
  const LogisticProblem prob(xs, rewards, weights, model.dim(), model.l2_lambda);
  std::vector<double> theta(model.weights);
  theta.push_back(model.bias);
  return prob.eval(theta, {});
}

double online_step_size(double eta0, double l2_lambda, std::uint64_t updates) noexcept {
  return eta0 / (1.0 + eta0 * l2_lambda * static_cast<double>(updates));
}

void sgd_step(OracleModel& model, const Context& x, int reward, double weight, double step_size) {
  if (x.dim() != model.dim()) {
    throw DimensionMismatch("partial_fit: observation dimension " + std::to_string(x.dim()) +
                            " != model dimension " + std::to_string(model.dim()));
  }
  if (!(weight > 0.0)) return;
  model.n_seen += 1;
  const double err = (logistic(model.linear_score(x)) - reward) * weight;
  const double shrink = 1.0 - step_size * model.l2_lambda / static_cast<double>(model.n_seen);
  if (shrink != 1.0) {
    for (double& w : model.weights) w *= shrink;
  }
  x.axpy_into(-step_size * err, model.weights);
  model.bias -= step_size * err;
}

OracleModel partial_fit(OracleModel model, std::span<const Observation> batch, double step_size) {
  if (!(step_size > 0.0)) throw InvalidArgument("partial_fit: step_size must be > 0");
  for (const Observation& obs : batch) {
    if (obs.x.dim() != model.dim()) {
      throw DimensionMismatch("partial_fit: batch dimension does not match model");
    }
  }
  for (const Observation& obs : batch) {
    if (obs.weight > 0.0) {
      sgd_step(model, obs.x, obs.reward, obs.weight, step_size);
      model.fitted = true;
    }
  }
  return model;
}

double predict_proba(const OracleModel& model, const Context& x) {
  if (x.dim() != model.dim()) {
    throw DimensionMismatch("predict_proba: context dimension " + std::to_string(x.dim()) +
                            " != model dimension " + std::to_string(model.dim()));
  }
  if (!model.fitted) return 0.5;
  return logistic(model.linear_score(x));
}

double grad_norm(const OracleModel& model, const Context& x, int hypothetical_label) {
  const double p = predict_proba(model, x);
  return std::fabs(p - hypothetical_label) * std::sqrt(x.squared_norm() + 1.0);
}

}  // namespace bforge
