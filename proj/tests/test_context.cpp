#include <doctest.h>

#include "bandit_forge/context.hpp"
#include "bandit_forge/errors.hpp"

using namespace bforge;

TEST_SUITE("context") {

TEST_CASE("dense conversion drops zeros and round-trips") {
  const Context x = Context::dense({0.0, 1.5, 0.0, -2.0});
  CHECK(x.dim() == 4);
  CHECK(x.nnz() == 2);
  CHECK(x.indices()[0] == 1);
  CHECK(x.indices()[1] == 3);
  CHECK(x.to_dense() == std::vector<double>{0.0, 1.5, 0.0, -2.0});
  CHECK(x.squared_norm() == doctest::Approx(6.25));
}

TEST_CASE("dot and axpy") {
  const Context x(3, {0, 2}, {2.0, -1.0});
  const std::vector<double> w{1.0, 5.0, 3.0};
  CHECK(x.dot(w) == -1.0);
  std::vector<double> acc(3, 0.0);
  x.axpy_into(0.5, acc);
  CHECK(acc == std::vector<double>{1.0, 0.0, -0.5});
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Context(3, {0, 3}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Context(3, {1, 1}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Context(3, {2, 1}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Context(3, {0}, {1.0, 1.0}), InvalidArgument);
  CHECK_NOTHROW(Context(3, {}, {}));
}

TEST_CASE("equality compares dimension and entries") {
  CHECK(Context::dense({1.0, 0.0}) == Context(2, {0}, {1.0}));
  CHECK_FALSE(Context::dense({1.0, 0.0}) == Context::dense({1.0, 0.0, 0.0}));
}

}
