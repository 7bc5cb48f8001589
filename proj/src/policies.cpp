#include "bandit_forge/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandit_forge/errors.hpp"
#include "bandit_forge/resampling.hpp"
#include "bandit_forge/stats.hpp"

namespace bforge {

namespace {

struct KindName {
  PolicyKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {PolicyKind::EpsilonGreedy, "epsilon-greedy"},
    {PolicyKind::ExploreThenExploit, "explore-then-exploit"},
    {PolicyKind::SoftmaxExplorer, "softmax-explorer"},
    {PolicyKind::BootstrappedUCB, "bootstrapped-ucb"},
    {PolicyKind::OnlineBootstrappedUCB, "online-bootstrapped-ucb"},
    {PolicyKind::BootstrappedTS, "bootstrapped-ts"},
    {PolicyKind::OnlineBootstrappedTS, "online-bootstrapped-ts"},
    {PolicyKind::AdaptiveGreedy, "adaptive-greedy"},
    {PolicyKind::AdaptiveGreedyWindow, "adaptive-greedy-window"},
    {PolicyKind::ActiveExplorer, "active-explorer"},
    {PolicyKind::ActiveAdaptiveGreedy, "active-adaptive-greedy"},
    {PolicyKind::BestArmMAB, "best-arm"},
    {PolicyKind::UniformRandom, "uniform-random"},
    {PolicyKind::FixedArm, "fixed-arm"},
};

// Stream purposes below the policy's base stream.
constexpr std::uint64_t kScoreStream = 1;
constexpr std::uint64_t kRefitStream = 2;
constexpr std::uint64_t kWeightStream = 3;

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvalidArgument(std::string(field) + ": " + what);
}

}  // namespace

std::string_view policy_name(PolicyKind kind) noexcept {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  return std::nullopt;
}

std::vector<std::string> policy_names() {
  std::vector<std::string> out;
  for (const auto& kn : kKindNames) out.emplace_back(kn.name);
  return out;
}

std::string_view coldstart_name(ColdStart c) noexcept {
  switch (c) {
    case ColdStart::MabFirst: return "mab-first";
    case ColdStart::Smoothing: return "smoothing";
    case ColdStart::None: return "none";
  }
  return "?";
}

std::optional<ColdStart> parse_coldstart(std::string_view name) noexcept {
  for (auto c : {ColdStart::MabFirst, ColdStart::Smoothing, ColdStart::None}) {
    if (coldstart_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view oracle_mode_name(OracleMode m) noexcept {
  return m == OracleMode::FullRefit ? "full-refit" : "mini-batch";
}

std::optional<OracleMode> parse_oracle_mode(std::string_view name) noexcept {
  if (name == "full-refit") return OracleMode::FullRefit;
  if (name == "mini-batch") return OracleMode::MiniBatch;
  return std::nullopt;
}

std::string_view branch_name(Branch b) noexcept {
  switch (b) {
    case Branch::Greedy: return "greedy";
    case Branch::Random: return "random";
    case Branch::Sampled: return "sampled";
    case Branch::Active: return "active";
    case Branch::Fixed: return "fixed";
  }
  return "?";
}

void PolicyConfig::validate() const {
  require(n_arms >= 1, "n_arms", "must be >= 1");
  require(l2_lambda > 0.0, "l2", "must be > 0");
  require(refit_every >= 1, "refit_every", "must be >= 1");
  require(eta0 > 0.0, "eta0", "must be > 0");
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon", "must lie in [0, 1]");
  require(epsilon_decay > 0.0 && epsilon_decay <= 1.0, "decay", "must lie in (0, 1]");
  require(softmax_multiplier > 0.0, "softmax_multiplier", "must be > 0");
  require(softmax_inflation > 0.0, "softmax_inflation", "must be > 0");
  require(resamples >= 1, "resamples", "must be >= 1");
  require(ucb_percentile >= 0.0 && ucb_percentile <= 100.0, "ucb_percentile", "must lie in [0, 100]");
  require(!threshold || (*threshold >= 0.0 && *threshold < 1.0), "threshold", "must lie in [0, 1)");
  require(threshold_decay > 0.0 && threshold_decay <= 1.0, "threshold_decay", "must lie in (0, 1]");
  require(window >= 1, "window", "must be >= 1");
  require(window_percentile >= 0.0 && window_percentile <= 100.0, "window_percentile",
          "must lie in [0, 100]");
  require(window_decay > 0.0 && window_decay <= 1.0, "window_decay", "must lie in (0, 1]");
  require(active_explore >= 0.0 && active_explore <= 1.0, "active_explore", "must lie in [0, 1]");
  require(kind != PolicyKind::FixedArm || fixed_arm < n_arms, "fixed_arm", "must be < n_arms");
  if (cold_start == ColdStart::MabFirst) mab_first.validate();
  if (cold_start == ColdStart::Smoothing) smoothing.validate();
}

bool PolicyConfig::bootstrapped() const noexcept {
  switch (kind) {
    case PolicyKind::BootstrappedUCB:
    case PolicyKind::OnlineBootstrappedUCB:
    case PolicyKind::BootstrappedTS:
    case PolicyKind::OnlineBootstrappedTS: return true;
    default: return false;
  }
}

bool PolicyConfig::online() const noexcept {
  return oracle_mode == OracleMode::MiniBatch || kind == PolicyKind::OnlineBootstrappedUCB ||
         kind == PolicyKind::OnlineBootstrappedTS;
}

bool PolicyConfig::uses_oracles() const noexcept {
  return kind != PolicyKind::BestArmMAB && kind != PolicyKind::UniformRandom &&
         kind != PolicyKind::FixedArm;
}

double PolicyConfig::initial_threshold() const noexcept {
  if (threshold) return *threshold;
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(n_arms)));
}

Policy::Policy(PolicyConfig cfg, std::size_t dim, RngStream rng)
    : cfg_(std::move(cfg)), dim_(dim), rng_(rng) {
  cfg_.validate();
  // Online variants and mini-batch mode are the same thing for bootstrapped kinds.
  if (cfg_.online()) {
    cfg_.oracle_mode = OracleMode::MiniBatch;
    if (cfg_.kind == PolicyKind::BootstrappedUCB) cfg_.kind = PolicyKind::OnlineBootstrappedUCB;
    if (cfg_.kind == PolicyKind::BootstrappedTS) cfg_.kind = PolicyKind::OnlineBootstrappedTS;
  }
  const std::size_t n_models = cfg_.bootstrapped() ? cfg_.resamples : 1;
  arms_.resize(cfg_.n_arms);
  for (std::size_t a = 0; a < arms_.size(); ++a) {
    ArmSlot& slot = arms_[a];
    slot.history = ArmHistory(dim);
    if (cfg_.uses_oracles()) slot.models.assign(n_models, OracleModel::zero(dim, cfg_.l2_lambda));
    slot.score_rng = rng_.derive(hash_ids(a, kScoreStream));
    slot.refit_rng = rng_.derive(hash_ids(a, kRefitStream));
    slot.weight_rng = rng_.derive(hash_ids(a, kWeightStream));
  }
  epsilon_ = cfg_.epsilon;
  threshold_ = cfg_.initial_threshold();
  multiplier_ = cfg_.softmax_multiplier;
  window_p_ = cfg_.window_percentile;
}

void Policy::set_models(std::size_t arm, std::vector<OracleModel> models, std::size_t n_pos,
                        std::size_t n_neg) {
  if (arm >= arms_.size()) throw ArmOutOfRange("set_models: arm out of range");
  for (const auto& m : models) {
    if (m.dim() != dim_) throw DimensionMismatch("set_models: model dimension mismatch");
  }
  arms_[arm].models = std::move(models);
  arms_[arm].fit_pos = n_pos;
  arms_[arm].fit_neg = n_neg;
}

double Policy::inner_score(ArmSlot& slot, const Context& x) {
  const auto& models = slot.models;
  switch (cfg_.kind) {
    case PolicyKind::BootstrappedUCB:
    case PolicyKind::OnlineBootstrappedUCB: {
      std::vector<double> preds(models.size());
      for (std::size_t s = 0; s < models.size(); ++s) preds[s] = predict_proba(models[s], x);
      return percentile_inplace(preds, cfg_.ucb_percentile);
    }
    case PolicyKind::BootstrappedTS:
    case PolicyKind::OnlineBootstrappedTS:
      return predict_proba(models[slot.score_rng.uniform_index(models.size())], x);
    default: return predict_proba(models.front(), x);
  }
}

double Policy::wrapped_score(std::size_t arm, const Context& x) {
  if (hook_) return hook_(arm, x);
  ArmSlot& slot = arms_[arm];
  if (cfg_.kind == PolicyKind::BestArmMAB) {
    return slot.score_rng.beta(1.0 + static_cast<double>(slot.live_pos),
                               1.0 + static_cast<double>(slot.live_neg));
  }
  // Explore-Then-Exploit runs on raw oracles; unfitted arms read 0.5.
  const ColdStart cs = cfg_.kind == PolicyKind::ExploreThenExploit ? ColdStart::None : cfg_.cold_start;
  switch (cs) {
    case ColdStart::MabFirst:
      return mab_first_score(slot.fit_pos, slot.fit_neg, cfg_.mab_first,
                             [&] { return inner_score(slot, x); }, slot.score_rng);
    case ColdStart::Smoothing:
      return smoothed_arm_score(slot.fit_pos, slot.fit_neg, cfg_.smoothing,
                                [&] { return inner_score(slot, x); });
    case ColdStart::None: break;
  }
  return inner_score(slot, x);
}

double Policy::score_arm(std::size_t arm, const Context& x) {
  if (arm >= arms_.size()) throw ArmOutOfRange("score_arm: arm out of range");
  if (x.dim() != dim_) throw DimensionMismatch("score_arm: context dimension mismatch");
  return wrapped_score(arm, x);
}

std::vector<double> Policy::score_all(const Context& x) {
  std::vector<double> scores(arms_.size());
  for_each_index(arms_.size(), cfg_.exec, [&](std::size_t a) { scores[a] = wrapped_score(a, x); });
  return scores;
}

std::vector<double> Policy::active_scores(const Context& x) const {
  std::vector<double> z(arms_.size());
  for_each_index(arms_.size(), cfg_.exec, [&](std::size_t a) {
    z[a] = active_score(arms_[a].models.front(), x, cfg_.active_criterion);
  });
  return z;
}

std::size_t Policy::argmax_tiebreak(std::span<const double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<std::size_t> best;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (scores[a] == top) best.push_back(a);
  }
  if (best.size() == 1) return best.front();
  return best[rng_.uniform_index(best.size())];
}

Decision Policy::random_decision() {
  return Decision{rng_.uniform_index(arms_.size()), {}, Branch::Random};
}

Decision Policy::select(const Context& x) {
  if (x.dim() != dim_) {
    throw DimensionMismatch("select: context dimension " + std::to_string(x.dim()) +
                            " != policy dimension " + std::to_string(dim_));
  }
  Decision d;
  switch (cfg_.kind) {
    case PolicyKind::EpsilonGreedy: d = select_epsilon_greedy(x); break;
    case PolicyKind::ExploreThenExploit: d = select_explore_then_exploit(x); break;
    case PolicyKind::SoftmaxExplorer: d = select_softmax(x); break;
    case PolicyKind::BootstrappedUCB:
    case PolicyKind::OnlineBootstrappedUCB:
    case PolicyKind::BootstrappedTS:
    case PolicyKind::OnlineBootstrappedTS: d = select_greedy_on_wrapped(x); break;
    case PolicyKind::AdaptiveGreedy: d = select_adaptive_greedy(x); break;
    case PolicyKind::AdaptiveGreedyWindow: d = select_adaptive_greedy_window(x, false); break;
    case PolicyKind::ActiveAdaptiveGreedy: d = select_adaptive_greedy_window(x, true); break;
    case PolicyKind::ActiveExplorer: d = select_active_explorer(x); break;
    case PolicyKind::BestArmMAB: d = select_best_arm(x); break;
    case PolicyKind::UniformRandom: d = random_decision(); break;
    case PolicyKind::FixedArm: d = Decision{cfg_.fixed_arm, {}, Branch::Fixed}; break;
  }
  pending_arm_ = d.arm;
  return d;
}

Decision Policy::select_epsilon_greedy(const Context& x) {
  Decision d;
  if (rng_.uniform() < epsilon_) {
    d = random_decision();
  } else {
    d.scores = score_all(x);
    d.arm = argmax_tiebreak(d.scores);
    d.branch = Branch::Greedy;
  }
  epsilon_ *= cfg_.epsilon_decay;
  return d;
}

Decision Policy::select_explore_then_exploit(const Context& x) {
  if (round_ < cfg_.breakpoint) return random_decision();
  return select_greedy_on_wrapped(x);
}

Decision Policy::select_softmax(const Context& x) {
  Decision d;
  d.scores = score_all(x);
  std::vector<double> logits(d.scores.size());
  for (std::size_t a = 0; a < logits.size(); ++a) logits[a] = multiplier_ * logit(d.scores[a], 1e-12);
  const auto probs = softmax(logits);
  const double u = rng_.uniform();
  double cdf = 0.0;
  d.arm = probs.size() - 1;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cdf += probs[a];
    if (u < cdf) {
      d.arm = a;
      break;
    }
  }
  d.branch = Branch::Sampled;
  multiplier_ *= cfg_.softmax_inflation;
  return d;
}

Decision Policy::select_greedy_on_wrapped(const Context& x) {
  Decision d;
  d.scores = score_all(x);
  d.arm = argmax_tiebreak(d.scores);
  d.branch = Branch::Greedy;
  return d;
}

Decision Policy::select_adaptive_greedy(const Context& x) {
  Decision d;
  d.scores = score_all(x);
  const double best = *std::max_element(d.scores.begin(), d.scores.end());
  if (best > threshold_) {
    d.arm = argmax_tiebreak(d.scores);
    d.branch = Branch::Greedy;
  } else {
    d.arm = rng_.uniform_index(arms_.size());
    d.branch = Branch::Random;
  }
  threshold_ *= cfg_.threshold_decay;
  return d;
}

Decision Policy::select_adaptive_greedy_window(const Context& x, bool active_explore) {
  Decision d;
  d.scores = score_all(x);
  const double best = *std::max_element(d.scores.begin(), d.scores.end());
  if (best > threshold_) {
    d.arm = argmax_tiebreak(d.scores);
    d.branch = Branch::Greedy;
  } else if (active_explore) {
    const auto z = active_scores(x);
    d.arm = argmax_tiebreak(z);
    d.branch = Branch::Active;
  } else {
    d.arm = rng_.uniform_index(arms_.size());
    d.branch = Branch::Random;
  }

  const std::size_t m = cfg_.window;
  window_.push_back(best);
  if (window_.size() > m) window_.pop_front();
  const std::uint64_t t = round_ + 1;  // rounds are 1-based in the threshold rule
  if (t >= m) {
    const bool recompute = !cfg_.fixed_window || t % m == 0;
    if (recompute) {
      std::vector<double> buf(window_.begin(), window_.end());
      threshold_ = percentile_inplace(buf, window_p_);
    }
    window_p_ *= cfg_.window_decay;
  }
  return d;
}

Decision Policy::select_active_explorer(const Context& x) {
  Decision d;
  if (rng_.uniform() < cfg_.active_explore) {
    d.scores = active_scores(x);
    d.arm = argmax_tiebreak(d.scores);
    d.branch = Branch::Active;
  } else {
    d.scores = score_all(x);
    d.arm = argmax_tiebreak(d.scores);
    d.branch = Branch::Greedy;
  }
  return d;
}

Decision Policy::select_best_arm(const Context& x) { return select_greedy_on_wrapped(x); }

void Policy::refit_arm(ArmSlot& slot) {
  slot.dirty = false;
  if (slot.history.two_class()) {
    if (cfg_.bootstrapped()) {
      const bool warm = slot.models.front().fitted;
      slot.models = refit_resamples(slot.history, cfg_.resamples, cfg_.l2_lambda, slot.refit_rng,
                                    warm ? std::span<const OracleModel>(slot.models)
                                         : std::span<const OracleModel>{},
                                    Exec::Serial);
    } else {
      FitOptions opts;
      opts.warm_start = &slot.models.front();
      slot.models.front() = fit_full(slot.history, cfg_.l2_lambda, opts);
    }
  }
  slot.fit_pos = slot.history.n_pos();
  slot.fit_neg = slot.history.n_neg();
}

void Policy::online_update(ArmSlot& slot, const Context& x, int reward) {
  if (cfg_.bootstrapped()) {
    for (OracleModel& model : slot.models) {
      const double w = draw_weight(WeightScheme::Gamma11Weights, slot.weight_rng);
      sgd_step(model, x, reward, w, online_step_size(cfg_.eta0, cfg_.l2_lambda, model.n_seen));
      model.fitted = true;
    }
  } else {
    OracleModel& model = slot.models.front();
    sgd_step(model, x, reward, 1.0, online_step_size(cfg_.eta0, cfg_.l2_lambda, model.n_seen));
    model.fitted = true;
  }
  slot.fit_pos = slot.live_pos;
  slot.fit_neg = slot.live_neg;
}

void Policy::update(const Context& x, std::size_t arm, int reward) {
  if (arm >= arms_.size()) {
    throw ArmOutOfRange("update: arm " + std::to_string(arm) + " out of range for " +
                        std::to_string(arms_.size()) + " arms");
  }
  if (!pending_arm_ || *pending_arm_ != arm) {
    throw ArmOutOfRange("update: arm " + std::to_string(arm) + " was not selected this round");
  }
  if (reward != 0 && reward != 1) throw InvalidArgument("update: reward must be 0 or 1");
  if (x.dim() != dim_) throw DimensionMismatch("update: context dimension mismatch");
  pending_arm_.reset();

  ArmSlot& slot = arms_[arm];
  (reward ? slot.live_pos : slot.live_neg) += 1;
  if (cfg_.uses_oracles()) {
    slot.history.add(x, reward);
    if (cfg_.online()) {
      online_update(slot, x, reward);
    } else {
      slot.dirty = true;
    }
  }
  round_ += 1;

  if (cfg_.uses_oracles() && !cfg_.online() && round_ % cfg_.refit_every == 0) {
    std::vector<std::size_t> dirty;
    for (std::size_t a = 0; a < arms_.size(); ++a) {
      if (arms_[a].dirty) dirty.push_back(a);
    }
    for_each_index(dirty.size(), cfg_.exec, [&](std::size_t i) { refit_arm(arms_[dirty[i]]); });
  }
}

}  // namespace bforge
