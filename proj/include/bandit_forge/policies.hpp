#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bandit_forge/active.hpp"
#include "bandit_forge/coldstart.hpp"
#include "bandit_forge/context.hpp"
#include "bandit_forge/oracle.hpp"
#include "bandit_forge/parallel.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge {

enum class PolicyKind {
  EpsilonGreedy,
  ExploreThenExploit,
  SoftmaxExplorer,
  BootstrappedUCB,
  OnlineBootstrappedUCB,
  BootstrappedTS,
  OnlineBootstrappedTS,
  AdaptiveGreedy,        // fixed, decaying threshold
  AdaptiveGreedyWindow,  // threshold from a percentile of recent best scores
  ActiveExplorer,
  ActiveAdaptiveGreedy,
  BestArmMAB,     // context-free Beta-Bernoulli Thompson sampling
  UniformRandom,  // reference
  FixedArm,       // reference
};

std::string_view policy_name(PolicyKind kind) noexcept;
std::optional<PolicyKind> parse_policy(std::string_view name) noexcept;
std::vector<std::string> policy_names();

enum class ColdStart { MabFirst, Smoothing, None };
std::string_view coldstart_name(ColdStart c) noexcept;
std::optional<ColdStart> parse_coldstart(std::string_view name) noexcept;

enum class OracleMode { FullRefit, MiniBatch };
std::string_view oracle_mode_name(OracleMode m) noexcept;
std::optional<OracleMode> parse_oracle_mode(std::string_view name) noexcept;

/// Which rule produced a decision.
enum class Branch { Greedy, Random, Sampled, Active, Fixed };
std::string_view branch_name(Branch b) noexcept;

struct Decision {
  std::size_t arm = 0;
  /// Per-arm scores when the rule computed them.
  std::vector<double> scores;
  Branch branch = Branch::Greedy;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::EpsilonGreedy;
  /// Names the policy in output and keys its random stream.
  std::string label;
  std::size_t n_arms = 0;

  ColdStart cold_start = ColdStart::MabFirst;
  MabFirstConfig mab_first{};
  SmoothingConfig smoothing{};

  double l2_lambda = 1.0;
  OracleMode oracle_mode = OracleMode::FullRefit;
  std::size_t refit_every = 50;
  double eta0 = 0.1;

  double epsilon = 0.2;  // EpsilonGreedy explore probability
  double epsilon_decay = 0.9999;
  std::size_t breakpoint = 2000;  // ExploreThenExploit
  double softmax_multiplier = 2.0;
  double softmax_inflation = 1.001;
  std::size_t resamples = 10;
  double ucb_percentile = 80.0;
  /// Initial threshold for the adaptive-greedy family; 1 / (2 sqrt(k)) when unset.
  std::optional<double> threshold;
  double threshold_decay = 0.9997;
  std::size_t window = 500;
  double window_percentile = 30.0;
  double window_decay = 0.9997;
  bool fixed_window = false;
  double active_explore = 0.15;  // ActiveExplorer explore probability
  ActiveCriterion active_criterion = ActiveCriterion::Weighted;
  std::size_t fixed_arm = 0;
  /// FixedArm only: the simulator points fixed_arm at the most frequent label.
  bool fixed_arm_most_common = false;

  Exec exec = Exec::Parallel;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  bool bootstrapped() const noexcept;
  bool online() const noexcept;
  bool uses_oracles() const noexcept;
  double initial_threshold() const noexcept;
};

/// Mutable state of one policy over one run: per-arm histories and oracles,
/// decayed hyperparameters, threshold window, and random streams.
///
/// select() and update() alternate; update() must name the arm returned by
/// the preceding select(). Per-arm scoring may run in parallel (cfg.exec);
/// each arm draws from its own stream so the result is schedule-independent.
class Policy {
 public:
  using ScoreHook = std::function<double(std::size_t arm, const Context& x)>;

  Policy(PolicyConfig cfg, std::size_t dim, RngStream rng);

  Decision select(const Context& x);
  void update(const Context& x, std::size_t arm, int reward);

  /// Cold-start-wrapped oracle estimate for one arm. Advances that arm's
  /// stream when a Beta or resample draw is needed.
  double score_arm(std::size_t arm, const Context& x);

  /// Replaces the wrapped score of every arm (tests and replays).
  void set_score_hook(ScoreHook hook) { hook_ = std::move(hook); }
  /// Overwrites an arm's oracle(s) and the class counts they are taken to
  /// have been fit on.
  void set_models(std::size_t arm, std::vector<OracleModel> models, std::size_t n_pos,
                  std::size_t n_neg);

  const PolicyConfig& config() const noexcept { return cfg_; }
  std::size_t n_arms() const noexcept { return arms_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t round() const noexcept { return round_; }
  double epsilon() const noexcept { return epsilon_; }
  double threshold() const noexcept { return threshold_; }
  double multiplier() const noexcept { return multiplier_; }
  double window_percentile() const noexcept { return window_p_; }
  std::size_t arm_pos(std::size_t arm) const { return arms_.at(arm).live_pos; }
  std::size_t arm_neg(std::size_t arm) const { return arms_.at(arm).live_neg; }
  const ArmHistory& history(std::size_t arm) const { return arms_.at(arm).history; }
  std::span<const OracleModel> models(std::size_t arm) const { return arms_.at(arm).models; }
  const RngStream& arm_weight_stream(std::size_t arm) const { return arms_.at(arm).weight_rng; }

 private:
  struct ArmSlot {
    ArmHistory history;
    std::vector<OracleModel> models;
    std::size_t live_pos = 0;
    std::size_t live_neg = 0;
    // Class counts of the data the current oracle reflects; the cold-start
    // wrappers read these so gate and oracle stay consistent between refits.
    std::size_t fit_pos = 0;
    std::size_t fit_neg = 0;
    bool dirty = false;
    RngStream score_rng;
    RngStream refit_rng;
    RngStream weight_rng;
  };

  double inner_score(ArmSlot& slot, const Context& x);
  double wrapped_score(std::size_t arm, const Context& x);
  std::vector<double> score_all(const Context& x);
  std::vector<double> active_scores(const Context& x) const;
  std::size_t argmax_tiebreak(std::span<const double> scores);

  Decision select_epsilon_greedy(const Context& x);
  Decision select_explore_then_exploit(const Context& x);
  Decision select_softmax(const Context& x);
  Decision select_greedy_on_wrapped(const Context& x);
  Decision select_adaptive_greedy(const Context& x);
  Decision select_adaptive_greedy_window(const Context& x, bool active_explore);
  Decision select_active_explorer(const Context& x);
  Decision select_best_arm(const Context& x);
  Decision random_decision();

  void refit_arm(ArmSlot& slot);
  void online_update(ArmSlot& slot, const Context& x, int reward);

  PolicyConfig cfg_;
  std::size_t dim_;
  RngStream rng_;
  std::vector<ArmSlot> arms_;
  ScoreHook hook_;
  std::uint64_t round_ = 0;
  std::optional<std::size_t> pending_arm_;

  double epsilon_;
  double threshold_;
  double multiplier_;
  double window_p_;
  std::deque<double> window_;
};

}  // namespace bforge
