#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bandit_forge/errors.hpp"
#include "bandit_forge/oracle.hpp"
#include "bandit_forge/stats.hpp"
#include "support.hpp"

using namespace bforge;
using bforge::testing::random_dense;

namespace {

double logloss(int r, double z) {
  // log(1 + e^z) - r z, stable for large |z|
  return (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - r * z;
}

// Parameters laid out as (w_0..w_{d-1}, b).
double ref_objective(const std::vector<double>& theta, const std::vector<std::vector<double>>& xs,
                     const std::vector<int>& rs, double lambda) {
  const std::size_t d = theta.size() - 1;
  double f = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double z = theta[d];
    for (std::size_t j = 0; j < d; ++j) z += theta[j] * xs[i][j];
    f += logloss(rs[i], z);
  }
  for (std::size_t j = 0; j < d; ++j) f += 0.5 * lambda * theta[j] * theta[j];
  return f;
}

// Plain gradient descent with a fixed 1/L step: a second optimizer that
// shares nothing with the library's Newton / L-BFGS code.
std::vector<double> gradient_descent(const std::vector<std::vector<double>>& xs, const std::vector<int>& rs,
                                     double lambda, int iters) {
  const std::size_t d = xs.front().size();
  double lip = lambda;
  for (const auto& x : xs) lip += 0.25 * (std::inner_product(x.begin(), x.end(), x.begin(), 0.0) + 1.0);
  const double step = 1.0 / lip;
  std::vector<double> theta(d + 1, 0.0), g(d + 1);
  for (int it = 0; it < iters; ++it) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double z = theta[d];
      for (std::size_t j = 0; j < d; ++j) z += theta[j] * xs[i][j];
      const double e = 1.0 / (1.0 + std::exp(-z)) - rs[i];
      for (std::size_t j = 0; j < d; ++j) g[j] += e * xs[i][j];
      g[d] += e;
    }
    for (std::size_t j = 0; j < d; ++j) g[j] += lambda * theta[j];
    for (std::size_t j = 0; j <= d; ++j) theta[j] -= step * g[j];
  }
  return theta;
}

OracleModel random_model(RngStream& rng, std::size_t dim, double scale = 1.0) {
  OracleModel m = OracleModel::zero(dim, 0.5);
  m.weights = random_dense(rng, dim, scale);
  m.bias = scale * rng.normal();
  m.fitted = true;
  return m;
}

ArmHistory logistic_history(std::size_t n, const std::vector<double>& beta, double bias, RngStream& rng) {
  ArmHistory h(beta.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = random_dense(rng, beta.size());
    double z = bias;
    for (std::size_t j = 0; j < beta.size(); ++j) z += beta[j] * x[j];
    h.add(Context::dense(x), rng.bernoulli(logistic(z)) ? 1 : 0);
  }
  return h;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("antisymmetric pair gives positive weight and zero bias") {
  ArmHistory h(1);
  h.add(Context::dense({1.0}), 1);
  h.add(Context::dense({-1.0}), 0);
  const OracleModel m = fit_full(h, 1.0);
  CHECK(m.fitted);
  CHECK(m.weights[0] > 0.0);
  CHECK(std::abs(m.bias) < 1e-8);
}

TEST_CASE("one-class history is rejected") {
  ArmHistory h(2);
  h.add(Context::dense({1.0, 0.0}), 1);
  h.add(Context::dense({0.0, 1.0}), 1);
  CHECK_THROWS_AS(fit_full(h, 1.0), OneClassData);
  CHECK_THROWS_AS(fit_full(ArmHistory(2), 1.0), OneClassData);
}

TEST_CASE("history validation") {
  ArmHistory h(2);
  CHECK_THROWS_AS(h.add(Context::dense({1.0}), 1), DimensionMismatch);
  CHECK_THROWS_AS(h.add(Context::dense({1.0, 2.0}), 2), InvalidArgument);
  CHECK_THROWS_AS(h.add(Context::dense({1.0, 2.0}), 1, 0.0), InvalidArgument);
  ArmHistory adopt;
  adopt.add(Context::dense({1.0, 2.0, 3.0}), 0);
  CHECK(adopt.dim() == 3);
  CHECK(adopt.n_neg() == 1);
}

TEST_CASE("3-coefficient recovery agrees with an independent gradient-descent optimizer") {
  RngStream rng(2024, 1);
  const std::vector<double> beta{1.0, -2.0, 0.5};
  const ArmHistory h = logistic_history(200, beta, 0.3, rng);
  const double lambda = 0.01;
  FitTrace trace;
  const OracleModel m = fit_full(h, lambda, {}, &trace);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(m.weights[j] - beta[j]) < 0.5);

  std::vector<std::vector<double>> xs;
  std::vector<int> rs;
  for (std::size_t i = 0; i < h.size(); ++i) {
    xs.push_back(h.contexts()[i].to_dense());
    rs.push_back(h.rewards()[i]);
  }
  const auto theta = gradient_descent(xs, rs, lambda, 100000);
  std::vector<double> ours(m.weights);
  ours.push_back(m.bias);
  const double f_ours = ref_objective(ours, xs, rs, lambda);
  const double f_gd = ref_objective(theta, xs, rs, lambda);
  CHECK(std::abs(f_ours - f_gd) < 1e-6);
  CHECK(objective(m, h.contexts(), h.rewards(), h.weights()) == doctest::Approx(f_ours).epsilon(1e-12));
  CHECK(trace.final_grad_norm < 1e-8);
}

TEST_CASE("objective decreases monotonically across iterations") {
  RngStream rng(5, 5);
  for (std::size_t dim : {3, 80}) {  // Newton path and L-BFGS path
    const ArmHistory h = logistic_history(300, random_dense(rng, dim), -0.5, rng);
    FitTrace trace;
    fit_full(h, 0.1, {}, &trace);
    CAPTURE(dim);
    REQUIRE(trace.objective.size() >= 2);
    // Non-increasing up to rounding noise near the optimum.
    for (std::size_t i = 1; i < trace.objective.size(); ++i)
      CHECK(trace.objective[i] <= trace.objective[i - 1] * (1.0 + 1e-12));
    CHECK(trace.final_grad_norm < 1e-8);
  }
}

TEST_CASE("Newton and L-BFGS reach the same optimum") {
  RngStream rng(6, 6);
  const ArmHistory h = logistic_history(250, random_dense(rng, 10), 0.2, rng);
  FitOptions newton, lbfgs;
  lbfgs.newton_max_dim = 0;
  const OracleModel a = fit_full(h, 0.5, newton);
  const OracleModel b = fit_full(h, 0.5, lbfgs);
  for (std::size_t j = 0; j < 10; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-6));
  CHECK(a.bias == doctest::Approx(b.bias).epsilon(1e-6));
}

TEST_CASE("fit is invariant to row order") {
  RngStream rng(7, 7);
  const ArmHistory h = logistic_history(150, random_dense(rng, 4), 0.0, rng);
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  ArmHistory rev(4);
  for (auto i : order) rev.add(h.contexts()[i], h.rewards()[i]);
  const OracleModel a = fit_full(h, 0.3), b = fit_full(rev, 0.3);
  for (std::size_t j = 0; j < 4; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-7));
  CHECK(a.bias == doctest::Approx(b.bias).epsilon(1e-7));
}

TEST_CASE("doubling weights and lambda leaves the optimum unchanged") {
  RngStream rng(8, 8);
  const ArmHistory h = logistic_history(150, random_dense(rng, 4), 0.4, rng);
  std::vector<double> w2(h.size(), 2.0);
  const OracleModel a = fit_full(h, 0.3);
  const OracleModel b = fit_weighted(h.contexts(), h.rewards(), w2, 4, 0.6);
  for (std::size_t j = 0; j < 4; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-7));
  CHECK(a.bias == doctest::Approx(b.bias).epsilon(1e-7));
}

TEST_CASE("integer weights equal duplicated rows; zero weights drop rows") {
  RngStream rng(9, 9);
  const ArmHistory h = logistic_history(60, random_dense(rng, 3), 0.0, rng);
  std::vector<double> w(h.size());
  ArmHistory dup(3);
  for (std::size_t i = 0; i < h.size(); ++i) {
    w[i] = static_cast<double>(i % 3);
    for (std::size_t c = 0; c < i % 3; ++c) dup.add(h.contexts()[i], h.rewards()[i]);
  }
  const OracleModel a = fit_weighted(h.contexts(), h.rewards(), w, 3, 0.2);
  const OracleModel b = fit_full(dup, 0.2);
  for (std::size_t j = 0; j < 3; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-7));
}

TEST_CASE("warm start reaches the same optimum in fewer iterations") {
  RngStream rng(10, 10);
  const ArmHistory h = logistic_history(300, random_dense(rng, 90), 0.0, rng);
  FitTrace cold, warm;
  const OracleModel a = fit_full(h, 1.0, {}, &cold);
  FitOptions opts;
  opts.warm_start = &a;
  const OracleModel b = fit_full(h, 1.0, opts, &warm);
  CHECK(warm.iterations <= 1);
  CHECK(cold.iterations > warm.iterations);
  for (std::size_t j = 0; j < 90; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-6));
}

TEST_CASE("partial_fit on a zero input moves only the bias") {
  OracleModel m = OracleModel::zero(2, 1.0);
  const std::vector<Observation> batch{{Context::dense({0.0, 0.0}), 1, 1.0}};
  const OracleModel out = partial_fit(m, batch, 0.1);
  CHECK(out.weights == std::vector<double>{0.0, 0.0});
  CHECK(out.bias == doctest::Approx(0.05));
  CHECK(out.fitted);
  CHECK(out.n_seen == 1);
}

TEST_CASE("partial_fit with all weights zero leaves the model unchanged") {
  RngStream rng(11, 11);
  OracleModel m = random_model(rng, 3);
  m.fitted = false;
  const std::vector<Observation> batch{{Context::dense({1.0, 2.0, 3.0}), 1, 0.0},
                                       {Context::dense({-1.0, 0.5, 0.0}), 0, 0.0}};
  CHECK(partial_fit(m, batch, 0.5) == m);
}

TEST_CASE("single SGD step equals minus step times the finite-difference gradient") {
  RngStream rng(12, 12);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(6);
    OracleModel m = random_model(rng, d, 0.7);
    m.l2_lambda = 0.3;
    m.n_seen = rng.uniform_index(20);
    const auto xd = random_dense(rng, d);
    const Context x = Context::dense(xd);
    const int r = rng.bernoulli(0.5) ? 1 : 0;
    const double w_obs = 0.1 + 2.0 * rng.uniform();
    const double s = 0.05;
    const double n_after = static_cast<double>(m.n_seen + 1);

    auto loss = [&](const std::vector<double>& w, double b) {
      double z = b, sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * xd[j], sq += w[j] * w[j];
      return w_obs * logloss(r, z) + 0.5 * m.l2_lambda / n_after * sq;
    };
    const double h = 1e-6;
    std::vector<double> fd(d + 1);
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = m.weights, wm = m.weights;
      double bp = m.bias, bm = m.bias;
      if (j < d) wp[j] += h, wm[j] -= h;
      else bp += h, bm -= h;
      fd[j] = (loss(wp, bp) - loss(wm, bm)) / (2 * h);
    }
    OracleModel next = m;
    sgd_step(next, x, r, w_obs, s);
    for (std::size_t j = 0; j <= d; ++j) {
      const double step = j < d ? (m.weights[j] - next.weights[j]) / s : (m.bias - next.bias) / s;
      CHECK(std::abs(step - fd[j]) <= 1e-5 * std::max(1e-3, std::abs(fd[j])));
    }
    CHECK(next.n_seen == m.n_seen + 1);
  }
}

TEST_CASE("online step-size schedule") {
  CHECK(online_step_size(0.1, 1.0, 0) == doctest::Approx(0.1));
  CHECK(online_step_size(0.1, 1.0, 10) == doctest::Approx(0.05));
  CHECK(online_step_size(0.1, 1.0, 100) < online_step_size(0.1, 1.0, 99));
}

TEST_CASE("predict_proba") {
  OracleModel m = OracleModel::zero(2, 1.0);
  const Context x = Context::dense({1.0, -3.0});
  CHECK(predict_proba(m, x) == 0.5);
  m.fitted = true;
  m.weights = {std::log(3.0), 0.0};
  CHECK(predict_proba(m, Context::dense({1.0, 0.0})) == doctest::Approx(0.75).epsilon(1e-15));
  m.weights = {-std::log(3.0), 0.0};
  CHECK(predict_proba(m, Context::dense({1.0, 0.0})) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(predict_proba(m, Context::dense({1.0})), DimensionMismatch);
}

TEST_CASE("predict_proba is monotone in the linear score") {
  RngStream rng(13, 13);
  for (int rep = 0; rep < 500; ++rep) {
    const OracleModel m = random_model(rng, 4);
    const Context a = Context::dense(random_dense(rng, 4)), b = Context::dense(random_dense(rng, 4));
    const double za = m.linear_score(a), zb = m.linear_score(b);
    if (std::abs(za - zb) < 1e-9 || std::max(std::abs(za), std::abs(zb)) > 30) continue;
    CHECK((za > zb) == (predict_proba(m, a) > predict_proba(m, b)));
  }
}

TEST_CASE("grad_norm examples") {
  const OracleModel zero = OracleModel::zero(3, 1.0);
  const Context x = Context::dense({1.0, 1.0, 1.0});
  CHECK(grad_norm(zero, x, 1) == doctest::Approx(1.0));
  CHECK(grad_norm(zero, x, 0) == doctest::Approx(1.0));

  RngStream rng(14, 14);
  for (int rep = 0; rep < 200; ++rep) {
    const OracleModel m = random_model(rng, 3, 0.5);
    const Context z = Context::dense(random_dense(rng, 3));
    const double p = predict_proba(m, z);
    CHECK(grad_norm(m, z, 0) / grad_norm(m, z, 1) == doctest::Approx(p / (1 - p)).epsilon(1e-12));
    CHECK((1 - p) * grad_norm(m, z, 0) + p * grad_norm(m, z, 1) ==
          doctest::Approx(2 * p * (1 - p) * std::sqrt(z.squared_norm() + 1)).epsilon(1e-10));
  }
}

TEST_CASE("grad_norm matches the finite-difference gradient norm") {
  RngStream rng(15, 15);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const OracleModel m = random_model(rng, d, 0.6);
    const auto xd = random_dense(rng, d);
    const int r = rng.bernoulli(0.5) ? 1 : 0;
    auto loss = [&](std::vector<double> w, double b) {
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * xd[j];
      return logloss(r, z);
    };
    const double h = 1e-6;
    double sq = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = m.weights, wm = m.weights;
      double bp = m.bias, bm = m.bias;
      if (j < d) wp[j] += h, wm[j] -= h;
      else bp += h, bm -= h;
      const double g = (loss(wp, bp) - loss(wm, bm)) / (2 * h);
      sq += g * g;
    }
    CHECK(bforge::testing::rel_close(grad_norm(m, Context::dense(xd), r), std::sqrt(sq), 1e-5));
  }
}

}
