#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bforge {

/// Percentile by linear interpolation between closest ranks.
///
/// For sorted values v of length n, the p-th percentile sits at 0-based rank
/// p/100 * (n - 1). p is clamped to [0, 100]. Throws InvalidArgument on an
/// empty sample.
double percentile(std::span<const double> values, double p);

/// Same, but reorders `values` in place instead of copying.
double percentile_inplace(std::span<double> values, double p);

double logistic(double z) noexcept;

/// ln(p / (1 - p)) with p clipped to [eps, 1 - eps].
double logit(double p, double eps = 1e-12) noexcept;

/// Softmax with the max subtracted before exponentiation.
std::vector<double> softmax(std::span<const double> logits);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> v);

}  // namespace bforge
