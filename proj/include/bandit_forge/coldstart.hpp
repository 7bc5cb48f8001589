#pragma once

#include <cstddef>
#include <functional>

#include "bandit_forge/context.hpp"
#include "bandit_forge/oracle.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge {

/// Shrinkage toward a / b. Requires 0 < a < b.
struct SmoothingConfig {
  double a = 3.0;
  double b = 7.0;
  void validate() const;
};

/// Beta(a + successes, b + failures) stand-in until an arm has at least m
/// observations of each reward class.
struct MabFirstConfig {
  double a = 3.0;
  double b = 7.0;
  std::size_t m = 2;
  void validate() const;
};

/// (n * r_hat + a) / (n + b).
double smooth(double r_hat, std::size_t n, const SmoothingConfig& cfg) noexcept;

/// Smoothed arm score. With a one-class (or empty) history the oracle is
/// bypassed and r_hat is the observed label; otherwise r_hat = inner().
double smoothed_arm_score(std::size_t n_pos, std::size_t n_neg, const SmoothingConfig& cfg,
                          const std::function<double()>& inner);

/// True when the Beta branch applies: n_neg < m or n_pos < m.
inline bool mab_first_gated(std::size_t n_pos, std::size_t n_neg, const MabFirstConfig& cfg) noexcept {
  return n_neg < cfg.m || n_pos < cfg.m;
}

/// Counts-based MAB-first: Beta draw from `rng` on the gated branch,
/// inner() otherwise.
double mab_first_score(std::size_t n_pos, std::size_t n_neg, const MabFirstConfig& cfg,
                       const std::function<double()>& inner, RngStream& rng);

/// History-based form: the branch depends only on the history's class
/// counts, never on x.
double mab_first_score(const ArmHistory& history, const MabFirstConfig& cfg,
                       const std::function<double(const Context&)>& inner, const Context& x,
                       RngStream& rng);

}  // namespace bforge
