#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bforge {

/// One round's covariate vector, stored sparse.
///
/// Indices are strictly increasing and below dim(). Dense vectors convert
/// via Context::dense, which keeps explicit zeros out of the index list.
class Context {
 public:
  Context() = default;
  Context(std::size_t dim, std::vector<std::uint32_t> indices, std::vector<double> values);

  static Context dense(std::span<const double> values);
  static Context dense(std::initializer_list<double> values) {
    return dense(std::span<const double>(values.begin(), values.size()));
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  double dot(std::span<const double> w) const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < indices_.size(); ++k) s += w[indices_[k]] * values_[k];
    return s;
  }

  /// w += alpha * x
  void axpy_into(double alpha, std::span<double> w) const noexcept {
    for (std::size_t k = 0; k < indices_.size(); ++k) w[indices_[k]] += alpha * values_[k];
  }

  double squared_norm() const noexcept;
  std::vector<double> to_dense() const;

  friend bool operator==(const Context&, const Context&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

}  // namespace bforge
