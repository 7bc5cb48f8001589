#include "bandit_forge/coldstart.hpp"

#include "bandit_forge/errors.hpp"

namespace bforge {

void SmoothingConfig::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(a < b)) {
    throw InvalidArgument("smoothing: constants must satisfy 0 < a < b");
  }
}

void MabFirstConfig::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("mab-first: prior a and b must be > 0");
  if (m < 1) throw InvalidArgument("mab-first: threshold m must be >= 1");
}

double smooth(double r_hat, std::size_t n, const SmoothingConfig& cfg) noexcept {
  const auto nd = static_cast<double>(n);
  return (nd * r_hat + cfg.a) / (nd + cfg.b);
}

double smoothed_arm_score(std::size_t n_pos, std::size_t n_neg, const SmoothingConfig& cfg,
                          const std::function<double()>& inner) {
  const std::size_t n = n_pos + n_neg;
  double r_hat = 0.0;
  if (n_pos > 0 && n_neg > 0) {
    r_hat = inner();
  } else if (n_pos > 0) {
    r_hat = 1.0;
  }
  return smooth(r_hat, n, cfg);
}

double mab_first_score(std::size_t n_pos, std::size_t n_neg, const MabFirstConfig& cfg,
                       const std::function<double()>& inner, RngStream& rng) {
  if (mab_first_gated(n_pos, n_neg, cfg)) {
    return rng.beta(cfg.a + static_cast<double>(n_pos), cfg.b + static_cast<double>(n_neg));
  }
  return inner();
}

double mab_first_score(const ArmHistory& history, const MabFirstConfig& cfg,
                       const std::function<double(const Context&)>& inner, const Context& x,
                       RngStream& rng) {
  return mab_first_score(history.n_pos(), history.n_neg(), cfg, [&] { return inner(x); }, rng);
}

}  // namespace bforge
