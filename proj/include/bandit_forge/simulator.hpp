#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandit_forge/datasets.hpp"
#include "bandit_forge/parallel.hpp"
#include "bandit_forge/policies.hpp"

namespace bforge {

struct SimConfig {
  std::size_t refit_every = 50;
  std::size_t n_runs = 10;
  std::uint64_t seed = 0;
  /// Restrict every run to a random subset of this many arms.
  std::optional<std::size_t> arm_subset;
  OracleMode oracle_mode = OracleMode::FullRefit;
  /// Stop each run early (full pass when unset).
  std::optional<std::size_t> max_rounds;
  /// Present rows in file order instead of a per-run shuffle.
  bool shuffle = true;
  /// Worker threads for (policy, run) jobs.
  int jobs = 1;
  /// Execution mode of the per-arm kernels inside each run.
  Exec exec = Exec::Parallel;

  void validate() const;
};

/// Per-round outcome of one run of one policy.
struct MetricsSeries {
  std::string policy;
  std::size_t rounds = 0;
  std::vector<std::uint8_t> rewards;
  /// cumulative_mean[t] = (sum of rewards[0..t]) / (t + 1).
  std::vector<double> cumulative_mean;
  std::vector<std::uint32_t> arms;

  friend bool operator==(const MetricsSeries&, const MetricsSeries&) = default;
};

struct RoundOutcome {
  std::size_t arm = 0;
  int reward = 0;
};

/// One round: the policy picks an arm for the row's features, earns 1 iff
/// that arm is among the row's labels, and is told only that reward.
/// `arm_labels` maps arm index to dataset label (empty = identity).
RoundOutcome run_round(Policy& policy, const MultilabelRow& row,
                       std::span<const std::uint32_t> arm_labels = {});

/// The arms and row order a given run uses; shared by every policy.
struct RunPlan {
  std::vector<std::size_t> order;
  /// arm index -> dataset label; identity when no subset is configured.
  std::vector<std::uint32_t> arm_labels;
};

RunPlan plan_run(const MultilabelDataset& ds, const SimConfig& sim, std::size_t run);

/// Concrete policy configuration for a run: arm count from the plan, refit
/// cadence and oracle mode from the simulation, most-common-arm resolution.
PolicyConfig resolve_policy(const MultilabelDataset& ds, const RunPlan& plan, PolicyConfig cfg,
                            const SimConfig& sim);

/// One full pass over the run's shuffled rows with a fresh policy.
MetricsSeries run_simulation(const MultilabelDataset& ds, const PolicyConfig& policy,
                             const SimConfig& sim, std::size_t run);

/// Every (policy, run) pair, parallel over sim.jobs threads; result is
/// indexed [policy][run] and independent of the thread count.
std::vector<std::vector<MetricsSeries>> run_experiment(const MultilabelDataset& ds,
                                                       std::span<const PolicyConfig> policies,
                                                       const SimConfig& sim);

/// Element-wise mean of cumulative_mean; rewards and arms are left empty.
/// LengthMismatch on differing lengths or policy names.
MetricsSeries average_runs(std::span<const MetricsSeries> series);

}  // namespace bforge
