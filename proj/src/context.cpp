#include "bandit_forge/context.hpp"

#include "bandit_forge/errors.hpp"

namespace bforge {

Context::Context(std::size_t dim, std::vector<std::uint32_t> indices, std::vector<double> values)
    : dim_(dim), indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) {
    throw InvalidArgument("Context: index and value lists differ in length");
  }
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= dim_) throw InvalidArgument("Context: feature index out of range");
    if (k > 0 && indices_[k] <= indices_[k - 1]) {
      throw InvalidArgument("Context: feature indices must be strictly increasing");
    }
  }
}

Context Context::dense(std::span<const double> values) {
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] != 0.0) {
      idx.push_back(static_cast<std::uint32_t>(j));
      val.push_back(values[j]);
    }
  }
  Context c;
  c.dim_ = values.size();
  c.indices_ = std::move(idx);
  c.values_ = std::move(val);
  return c;
}

double Context::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

std::vector<double> Context::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] = values_[k];
  return out;
}

}  // namespace bforge
