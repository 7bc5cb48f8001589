#include <doctest.h>

#include <cmath>

#include "bandit_forge/active.hpp"
#include "support.hpp"

using namespace bforge;

TEST_SUITE("active") {

TEST_CASE("criterion names round-trip") {
  for (auto c : {ActiveCriterion::Weighted, ActiveCriterion::Min, ActiveCriterion::Max}) {
    CHECK(parse_criterion(criterion_name(c)) == c);
  }
  CHECK_FALSE(parse_criterion("mean").has_value());
}

TEST_CASE("zero model: both gradient norms are equal") {
  const OracleModel m = OracleModel::zero(3, 1.0);
  const Context x = Context::dense({1.0, 1.0, 1.0});  // |x|^2 + 1 = 4
  CHECK(active_score(m, x, ActiveCriterion::Min) == doctest::Approx(1.0));
  CHECK(active_score(m, x, ActiveCriterion::Max) == doctest::Approx(1.0));
  // (1-p) * 1 + p * 1 with p = 1/2 ... = 2 p (1-p) sqrt(4) = 1
  CHECK(active_score(m, x, ActiveCriterion::Weighted) == doctest::Approx(1.0));
}

TEST_CASE("weighted closed form, ordering and limits") {
  RngStream rng(1, 1);
  for (int rep = 0; rep < 1000; ++rep) {
    OracleModel m = OracleModel::zero(4, 1.0);
    m.weights = testing::random_dense(rng, 4);
    m.bias = rng.normal();
    m.fitted = true;
    const Context x = Context::dense(testing::random_dense(rng, 4));
    const double p = predict_proba(m, x);
    const double root = std::sqrt(x.squared_norm() + 1.0);
    const double w = active_score(m, x, ActiveCriterion::Weighted);
    CHECK(std::abs(w - 2 * p * (1 - p) * root) <= 1e-10);
    const double lo = active_score(m, x, ActiveCriterion::Min);
    const double hi = active_score(m, x, ActiveCriterion::Max);
    CHECK(lo <= w + 1e-15);
    CHECK(w <= hi + 1e-15);
    CHECK(hi == doctest::Approx(std::max(p, 1 - p) * root).epsilon(1e-12));
    CHECK(w >= 0.0);
  }
  OracleModel sure = OracleModel::zero(1, 1.0);
  sure.weights = {40.0};
  sure.fitted = true;
  const Context x = Context::dense({1.0});
  CHECK(active_score(sure, x, ActiveCriterion::Weighted) < 1e-15);
  CHECK(active_score(sure, x, ActiveCriterion::Max) == doctest::Approx(std::sqrt(2.0)));
}

}
