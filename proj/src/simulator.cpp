#include "bandit_forge/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "bandit_forge/errors.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge {

void SimConfig::validate() const {
  if (refit_every < 1) throw InvalidArgument("refit_every: must be >= 1");
  if (n_runs < 1) throw InvalidArgument("runs: must be >= 1");
  if (jobs < 1) throw InvalidArgument("jobs: must be >= 1");
  if (arm_subset && *arm_subset < 1) throw InvalidArgument("arm_subset: must be >= 1");
}

RoundOutcome run_round(Policy& policy, const MultilabelRow& row,
                       std::span<const std::uint32_t> arm_labels) {
  const Decision d = policy.select(row.features);
  const std::size_t label = arm_labels.empty() ? d.arm : arm_labels[d.arm];
  const int reward = row.has_label(label) ? 1 : 0;
  policy.update(row.features, d.arm, reward);
  return {d.arm, reward};
}

RunPlan plan_run(const MultilabelDataset& ds, const SimConfig& sim, std::size_t run) {
  RunPlan plan;
  if (sim.shuffle) {
    plan.order = shuffle_order(ds.n_rows(), hash_ids(sim.seed, run, hash_name("shuffle")));
  } else {
    plan.order.resize(ds.n_rows());
    std::iota(plan.order.begin(), plan.order.end(), 0);
  }
  if (sim.max_rounds && *sim.max_rounds < plan.order.size()) plan.order.resize(*sim.max_rounds);
  if (sim.arm_subset) {
    plan.arm_labels = sample_arm_subset(ds.n_labels, *sim.arm_subset,
                                        hash_ids(sim.seed, run, hash_name("arm_subset")));
  } else {
    plan.arm_labels.resize(ds.n_labels);
    std::iota(plan.arm_labels.begin(), plan.arm_labels.end(), 0u);
  }
  return plan;
}

PolicyConfig resolve_policy(const MultilabelDataset& ds, const RunPlan& plan, PolicyConfig cfg,
                            const SimConfig& sim) {
  cfg.n_arms = plan.arm_labels.size();
  cfg.refit_every = sim.refit_every;
  if (sim.oracle_mode == OracleMode::MiniBatch) cfg.oracle_mode = OracleMode::MiniBatch;
  cfg.exec = sim.exec;
  if (cfg.label.empty()) cfg.label = std::string(policy_name(cfg.kind));
  if (cfg.kind == PolicyKind::FixedArm && cfg.fixed_arm_most_common) {
    const auto counts = ds.label_counts();
    std::size_t best = 0;
    for (std::size_t a = 1; a < plan.arm_labels.size(); ++a) {
      if (counts[plan.arm_labels[a]] > counts[plan.arm_labels[best]]) best = a;
    }
    cfg.fixed_arm = best;
  }
  return cfg;
}

MetricsSeries run_simulation(const MultilabelDataset& ds, const PolicyConfig& policy,
                             const SimConfig& sim, std::size_t run) {
  sim.validate();
  const RunPlan plan = plan_run(ds, sim, run);
  const PolicyConfig cfg = resolve_policy(ds, plan, policy, sim);
  Policy pol(cfg, ds.n_features, RngStream(sim.seed, hash_ids(hash_name(cfg.label), run)));

  MetricsSeries out;
  out.policy = cfg.label;
  out.rounds = plan.order.size();
  out.rewards.reserve(out.rounds);
  out.cumulative_mean.reserve(out.rounds);
  out.arms.reserve(out.rounds);
  std::uint64_t total = 0;
  for (std::size_t t = 0; t < plan.order.size(); ++t) {
    const auto res = run_round(pol, ds.rows[plan.order[t]], plan.arm_labels);
    total += static_cast<std::uint64_t>(res.reward);
    out.rewards.push_back(static_cast<std::uint8_t>(res.reward));
    out.arms.push_back(static_cast<std::uint32_t>(res.arm));
    out.cumulative_mean.push_back(static_cast<double>(total) / static_cast<double>(t + 1));
  }
  return out;
}

std::vector<std::vector<MetricsSeries>> run_experiment(const MultilabelDataset& ds,
                                                       std::span<const PolicyConfig> policies,
                                                       const SimConfig& sim) {
  sim.validate();
  std::set<std::string> labels;
  for (const auto& p : policies) {
    const std::string label = p.label.empty() ? std::string(policy_name(p.kind)) : p.label;
    if (!labels.insert(label).second) throw InvalidArgument("policy label '" + label + "' repeated");
  }
  const std::size_t n_pol = policies.size();
  std::vector<std::vector<MetricsSeries>> out(n_pol, std::vector<MetricsSeries>(sim.n_runs));
  for_each_index(
      n_pol * sim.n_runs, sim.jobs > 1 ? Exec::Parallel : Exec::Serial,
      [&](std::size_t job) {
        const std::size_t p = job / sim.n_runs;
        const std::size_t r = job % sim.n_runs;
        out[p][r] = run_simulation(ds, policies[p], sim, r);
      },
      sim.jobs);
  return out;
}

MetricsSeries average_runs(std::span<const MetricsSeries> series) {
  if (series.empty()) throw LengthMismatch("average_runs: no series");
  MetricsSeries out;
  out.policy = series.front().policy;
  out.rounds = series.front().cumulative_mean.size();
  out.cumulative_mean.assign(out.rounds, 0.0);
  for (const auto& s : series) {
    if (s.cumulative_mean.size() != out.rounds) throw LengthMismatch("average_runs: lengths differ");
    if (s.policy != out.policy) throw LengthMismatch("average_runs: policy names differ");
    for (std::size_t t = 0; t < out.rounds; ++t) out.cumulative_mean[t] += s.cumulative_mean[t];
  }
  const auto n = static_cast<double>(series.size());
  for (double& v : out.cumulative_mean) v /= n;
  return out;
}

}  // namespace bforge
