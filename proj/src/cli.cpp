#include "bandit_forge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "bandit_forge/coverage.hpp"
#include "bandit_forge/datasets.hpp"
#include "bandit_forge/errors.hpp"
#include "bandit_forge/policies.hpp"
#include "bandit_forge/simulator.hpp"
#include "bandit_forge/svg.hpp"

namespace bforge {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kMostCommonAlias = "most-common-arm";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t pos = 0;
    while (pos <= item.size()) {
      const auto comma = std::min(item.find(',', pos), item.size());
      if (comma > pos) out.push_back(item.substr(pos, comma - pos));
      pos = comma + 1;
    }
  }
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("BANDIT_FORGE_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("BANDIT_FORGE_SEED: not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
  }
  return 0;
}

// Drops "--out X" / "--out=X" so a manifest can be replayed elsewhere.
std::vector<std::string> without_out(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

std::string header_line(const json& config) { return "# bandit-forge " + config.dump() + "\n"; }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("error writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& args,
                    const json& config, const std::vector<std::string>& files) {
  json m;
  m["tool"] = "bandit-forge";
  m["command"] = command;
  m["args"] = args;
  m["config"] = config;
  m["files"] = files;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string dataset;
  std::vector<std::string> policies;
  std::string out = "out";
  PolicyConfig base;
  std::string coldstart = "mab-first";
  std::string active_criterion = "weighted";
  std::string oracle_mode = "full-refit";
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  std::size_t runs = 10;
  std::size_t refit_every = 50;
  int jobs = 1;
  std::optional<std::size_t> arm_subset;
  std::size_t drop_top_labels = 0;
  int label_base = 0;
  int feature_base = 0;
  std::optional<std::size_t> max_rounds;
  bool no_shuffle = false;
  bool svg = false;
};

void add_simulate_flags(CLI::App& cmd, SimulateOptions& o) {
  auto& p = o.base;
  cmd.add_option("--dataset", o.dataset, "Multilabel dataset (plain or .gz)")->required();
  cmd.add_option("--policy", o.policies, "Policy name; repeat or comma-separate")->required();
  cmd.add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd.add_option("--epsilon", p.epsilon, "Epsilon-greedy explore probability")->capture_default_str();
  cmd.add_option("--decay", p.epsilon_decay, "Epsilon-greedy decay per round")->capture_default_str();
  cmd.add_option("--ag-decay", p.threshold_decay, "Adaptive-greedy threshold decay")->capture_default_str();
  cmd.add_option("--threshold", o.threshold, "Adaptive-greedy initial threshold (default 1/(2 sqrt k))");
  cmd.add_option("--window", p.window, "Adaptive-greedy window size")->capture_default_str();
  cmd.add_option("--window-percentile", p.window_percentile, "Window threshold percentile")->capture_default_str();
  cmd.add_option("--window-decay", p.window_decay, "Window percentile decay")->capture_default_str();
  cmd.add_flag("--fixed-window", p.fixed_window, "Recompute the window threshold every m rounds only");
  cmd.add_option("--softmax-multiplier", p.softmax_multiplier, "Softmax logit multiplier")->capture_default_str();
  cmd.add_option("--softmax-inflation", p.softmax_inflation, "Softmax multiplier growth")->capture_default_str();
  cmd.add_option("--resamples", p.resamples, "Bootstrap resamples")->capture_default_str();
  cmd.add_option("--ucb-percentile", p.ucb_percentile, "UCB percentile")->capture_default_str();
  cmd.add_option("--active-p", p.active_explore, "Active explorer explore probability")->capture_default_str();
  cmd.add_option("--active-criterion", o.active_criterion, "weighted | min | max")->capture_default_str();
  cmd.add_option("--breakpoint", p.breakpoint, "Explore-then-exploit switch round")->capture_default_str();
  cmd.add_option("--fixed-arm", p.fixed_arm, "Arm for fixed-arm")->capture_default_str();
  cmd.add_option("--coldstart", o.coldstart, "mab-first | smoothing | none")->capture_default_str();
  cmd.add_option("--prior-a", p.mab_first.a, "Cold-start prior a")->capture_default_str();
  cmd.add_option("--prior-b", p.mab_first.b, "Cold-start prior b")->capture_default_str();
  cmd.add_option("--prior-m", p.mab_first.m, "MAB-first per-class minimum")->capture_default_str();
  cmd.add_option("--l2", p.l2_lambda, "Oracle L2 strength")->capture_default_str();
  cmd.add_option("--eta0", p.eta0, "Online step-size scale")->capture_default_str();
  cmd.add_option("--refit-every", o.refit_every, "Rounds between oracle refits")->capture_default_str();
  cmd.add_option("--oracle-mode", o.oracle_mode, "full-refit | mini-batch")->capture_default_str();
  cmd.add_option("--runs", o.runs, "Runs per policy")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Seed (falls back to BANDIT_FORGE_SEED, then 0)");
  cmd.add_option("--jobs", o.jobs, "Worker threads for (policy, run) jobs")->capture_default_str();
  cmd.add_option("--arm-subset", o.arm_subset, "Restrict each run to a random subset of arms");
  cmd.add_option("--drop-top-labels", o.drop_top_labels, "Remove the most frequent labels first")
      ->capture_default_str();
  cmd.add_option("--label-base", o.label_base, "First label index in the file (0 or 1)")->capture_default_str();
  cmd.add_option("--feature-base", o.feature_base, "First feature index in the file (0 or 1)")
      ->capture_default_str();
  cmd.add_option("--max-rounds", o.max_rounds, "Stop each run after this many rounds");
  cmd.add_flag("--no-shuffle", o.no_shuffle, "Keep file order instead of shuffling per run");
  cmd.add_flag("--svg", o.svg, "Also render averaged.svg");
}

std::vector<PolicyConfig> build_policies(const SimulateOptions& o) {
  PolicyConfig base = o.base;
  const auto cs = parse_coldstart(o.coldstart);
  if (!cs) throw ConfigError("coldstart: unknown value '" + o.coldstart + "' (valid: mab-first, smoothing, none)");
  base.cold_start = *cs;
  base.smoothing.a = base.mab_first.a;
  base.smoothing.b = base.mab_first.b;
  const auto crit = parse_criterion(o.active_criterion);
  if (!crit) throw ConfigError("active-criterion: unknown value '" + o.active_criterion + "' (valid: weighted, min, max)");
  base.active_criterion = *crit;
  const auto mode = parse_oracle_mode(o.oracle_mode);
  if (!mode) throw ConfigError("oracle-mode: unknown value '" + o.oracle_mode + "' (valid: full-refit, mini-batch)");
  base.oracle_mode = *mode;
  base.threshold = o.threshold;
  base.refit_every = o.refit_every;

  std::vector<PolicyConfig> out;
  for (const auto& name : split_list(o.policies)) {
    PolicyConfig cfg = base;
    cfg.label = name;
    if (name == kMostCommonAlias) {
      cfg.kind = PolicyKind::FixedArm;
      cfg.fixed_arm_most_common = true;
    } else if (const auto kind = parse_policy(name)) {
      cfg.kind = *kind;
    } else {
      auto names = policy_names();
      names.push_back(kMostCommonAlias);
      throw ConfigError("policy: unknown name '" + name + "' (valid: " + join(names, ", ") + ")");
    }
    for (const auto& prev : out) {
      if (prev.label == name) throw ConfigError("policy: '" + name + "' given more than once");
    }
    out.push_back(cfg);
  }
  if (out.empty()) throw ConfigError("policy: at least one policy required");
  return out;
}

json policy_json(const PolicyConfig& p) {
  json j;
  j["label"] = p.label;
  j["kind"] = std::string(policy_name(p.kind));
  j["coldstart"] = std::string(coldstart_name(p.cold_start));
  j["prior_a"] = p.mab_first.a;
  j["prior_b"] = p.mab_first.b;
  j["prior_m"] = p.mab_first.m;
  j["l2"] = p.l2_lambda;
  j["eta0"] = p.eta0;
  j["oracle_mode"] = std::string(oracle_mode_name(p.oracle_mode));
  switch (p.kind) {
    case PolicyKind::EpsilonGreedy:
      j["epsilon"] = p.epsilon;
      j["decay"] = p.epsilon_decay;
      break;
    case PolicyKind::ExploreThenExploit: j["breakpoint"] = p.breakpoint; break;
    case PolicyKind::SoftmaxExplorer:
      j["softmax_multiplier"] = p.softmax_multiplier;
      j["softmax_inflation"] = p.softmax_inflation;
      break;
    case PolicyKind::BootstrappedUCB:
    case PolicyKind::OnlineBootstrappedUCB:
      j["resamples"] = p.resamples;
      j["ucb_percentile"] = p.ucb_percentile;
      break;
    case PolicyKind::BootstrappedTS:
    case PolicyKind::OnlineBootstrappedTS: j["resamples"] = p.resamples; break;
    case PolicyKind::AdaptiveGreedy:
      j["threshold"] = p.threshold ? json(*p.threshold) : json("1/(2 sqrt k)");
      j["ag_decay"] = p.threshold_decay;
      break;
    case PolicyKind::AdaptiveGreedyWindow:
    case PolicyKind::ActiveAdaptiveGreedy:
      j["threshold"] = p.threshold ? json(*p.threshold) : json("1/(2 sqrt k)");
      j["window"] = p.window;
      j["window_percentile"] = p.window_percentile;
      j["window_decay"] = p.window_decay;
      j["fixed_window"] = p.fixed_window;
      if (p.kind == PolicyKind::ActiveAdaptiveGreedy) j["active_criterion"] = std::string(criterion_name(p.active_criterion));
      break;
    case PolicyKind::ActiveExplorer:
      j["active_p"] = p.active_explore;
      j["active_criterion"] = std::string(criterion_name(p.active_criterion));
      break;
    case PolicyKind::FixedArm:
      if (p.fixed_arm_most_common) {
        j["fixed_arm"] = "most-common";
      } else {
        j["fixed_arm"] = p.fixed_arm;
      }
      break;
    case PolicyKind::BestArmMAB:
    case PolicyKind::UniformRandom: break;
  }
  return j;
}

int simulate_command(const SimulateOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  auto policies = build_policies(o);
  SimConfig sim;
  sim.refit_every = o.refit_every;
  sim.n_runs = o.runs;
  sim.seed = resolve_seed(o.seed);
  sim.arm_subset = o.arm_subset;
  sim.oracle_mode = policies.front().oracle_mode;
  sim.max_rounds = o.max_rounds;
  sim.shuffle = !o.no_shuffle;
  sim.jobs = o.jobs;
  sim.validate();

  ParseOptions popts;
  popts.label_base = o.label_base;
  popts.feature_base = o.feature_base;
  MultilabelDataset ds = load_xc(o.dataset, popts);
  if (o.drop_top_labels > 0) ds = drop_most_common_labels(ds, o.drop_top_labels).data;
  if (sim.arm_subset && *sim.arm_subset > ds.n_labels) {
    throw SubsetTooLarge("arm-subset: " + std::to_string(*sim.arm_subset) + " exceeds the " +
                         std::to_string(ds.n_labels) + " labels");
  }
  // Validate every policy against the real arm count before any work starts.
  for (const auto& p : policies) {
    resolve_policy(ds, plan_run(ds, SimConfig{sim}, 0), p, sim).validate();
  }

  json config;
  config["command"] = "simulate";
  config["seed"] = sim.seed;
  config["dataset"] = fs::path(o.dataset).filename().string();
  config["runs"] = sim.n_runs;
  config["refit_every"] = sim.refit_every;
  config["oracle_mode"] = std::string(oracle_mode_name(sim.oracle_mode));
  config["shuffle"] = sim.shuffle;
  config["arm_subset"] = sim.arm_subset ? json(*sim.arm_subset) : json(nullptr);
  config["drop_top_labels"] = o.drop_top_labels;
  config["max_rounds"] = sim.max_rounds ? json(*sim.max_rounds) : json(nullptr);
  config["jobs"] = sim.jobs;
  config["policies"] = json::array();
  for (const auto& p : policies) config["policies"].push_back(policy_json(p));
  const std::string header = header_line(config);

  const auto results = run_experiment(ds, policies, sim);

  const fs::path dir = o.out;
  ensure_dir(dir);
  std::vector<std::string> files;
  std::vector<std::vector<std::uint32_t>> arm_labels(sim.n_runs);
  for (std::size_t r = 0; r < sim.n_runs; ++r) arm_labels[r] = plan_run(ds, sim, r).arm_labels;
  std::string averaged = header + "policy,round,cumulative_mean_reward\n";
  std::vector<Curve> curves;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    for (std::size_t r = 0; r < sim.n_runs; ++r) {
      const auto& s = results[p][r];
      std::string text = header + "round,cumulative_mean_reward,arm,reward\n";
      for (std::size_t t = 0; t < s.rounds; ++t) {
        text += std::to_string(t + 1) + ',' + format_number(s.cumulative_mean[t]) + ',' +
                std::to_string(arm_labels[r][s.arms[t]]) + ',' + std::to_string(s.rewards[t]) + '\n';
      }
      const std::string name = s.policy + ".run" + std::to_string(r) + ".csv";
      write_file(dir / name, text);
      files.push_back(name);
    }
    const auto avg = average_runs(results[p]);
    Curve c{avg.policy, {}, {}};
    for (std::size_t t = 0; t < avg.rounds; ++t) {
      averaged += avg.policy + ',' + std::to_string(t + 1) + ',' + format_number(avg.cumulative_mean[t]) + '\n';
      c.x.push_back(static_cast<double>(t + 1));
      c.y.push_back(avg.cumulative_mean[t]);
    }
    curves.push_back(std::move(c));
    out << avg.policy << ": final cumulative mean reward " << format_number(avg.cumulative_mean.empty() ? 0.0 : avg.cumulative_mean.back())
        << " over " << avg.rounds << " rounds, " << sim.n_runs << " runs\n";
  }
  write_file(dir / "averaged.csv", averaged);
  files.push_back("averaged.csv");
  if (o.svg) {
    write_file(dir / "averaged.svg", render_svg(curves, header.substr(2, header.size() - 3)));
    files.push_back("averaged.svg");
  }
  write_manifest(dir, "simulate", args, config, files);
  out << "wrote " << files.size() << " files to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- coverage

struct CoverageOptions {
  std::string preset = "logistic-independent";
  std::vector<std::string> schemes;
  std::vector<std::size_t> sizes;
  std::size_t n_samples = 100;
  std::size_t resamples = 10;
  double percentile = 80.0;
  std::size_t n_test = 1000;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out = "out";
};

const std::map<std::string, GeneratorSpec (*)()>& presets() {
  static const std::map<std::string, GeneratorSpec (*)()> m{
      {"linear-large-bias", &linear_large_bias_spec},
      {"logistic-independent", &logistic_independent_spec},
      {"logistic-correlated", &logistic_correlated_spec},
  };
  return m;
}

int coverage_command(const CoverageOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto it = presets().find(o.preset);
  if (it == presets().end()) {
    std::vector<std::string> names;
    for (const auto& [k, v] : presets()) names.push_back(k);
    throw ConfigError("preset: unknown value '" + o.preset + "' (valid: " + join(names, ", ") + ")");
  }
  const GeneratorSpec spec = it->second();
  CoverageConfig cfg;
  if (!o.sizes.empty()) cfg.sample_sizes = o.sizes;
  if (!o.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& name : split_list(o.schemes)) {
      const auto s = parse_scheme(name);
      if (!s) {
        throw ConfigError("schemes: unknown scheme '" + name + "' (valid: bootstrap, poisson, uniform, gamma11, gamma22)");
      }
      cfg.schemes.push_back(*s);
    }
  }
  cfg.n_samples = o.n_samples;
  cfg.n_resamples = o.resamples;
  cfg.percentile = o.percentile;
  cfg.n_test = o.n_test;
  cfg.seed = resolve_seed(o.seed);
  cfg.jobs = o.jobs;
  cfg.validate();

  json config;
  config["command"] = "coverage";
  config["seed"] = cfg.seed;
  config["preset"] = o.preset;
  config["schemes"] = json::array();
  for (auto s : cfg.schemes) config["schemes"].push_back(std::string(scheme_name(s)));
  config["sizes"] = cfg.sample_sizes;
  config["n_samples"] = cfg.n_samples;
  config["resamples"] = cfg.n_resamples;
  config["percentile"] = cfg.percentile;
  config["n_test"] = cfg.n_test;
  config["jobs"] = cfg.jobs;
  const std::string header = header_line(config);

  const auto cells = run_coverage(spec, cfg);
  std::string text = header + "sample_size,scheme,mean_pct,std_pct\n";
  for (const auto& c : cells) {
    text += std::to_string(c.sample_size) + ',' + std::string(scheme_name(c.scheme)) + ',' +
            format_number(100.0 * c.mean) + ',' + format_number(100.0 * c.std) + '\n';
  }
  const fs::path dir = o.out;
  ensure_dir(dir);
  write_file(dir / "coverage.csv", text);
  write_manifest(dir, "coverage", args, config, {"coverage.csv"});
  out << text.substr(header.size());
  return kExitOk;
}

// ---------------------------------------------------------------- other

int dataset_info_command(const std::string& path, int label_base, int feature_base, bool as_json, std::ostream& out) {
  ParseOptions popts;
  popts.label_base = label_base;
  popts.feature_base = feature_base;
  const auto st = dataset_stats(load_xc(path, popts));
  if (as_json) {
    json j;
    j["n_rows"] = st.n_rows;
    j["n_features"] = st.n_features;
    j["n_labels"] = st.n_labels;
    j["labels_per_obs"] = st.labels_per_obs;
    j["obs_per_label"] = st.obs_per_label;
    j["most_common_label"] = st.most_common_label;
    j["most_common_frac"] = st.most_common_frac;
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "rows:              " << st.n_rows << "\n"
      << "features:          " << st.n_features << "\n"
      << "labels:            " << st.n_labels << "\n"
      << "labels per row:    " << format_number(st.labels_per_obs) << "\n"
      << "rows per label:    " << format_number(st.obs_per_label) << "\n"
      << "most common label: " << st.most_common_label << " (" << format_number(100.0 * st.most_common_frac)
      << "% of rows)\n";
  return kExitOk;
}

int render_svg_command(const std::string& csv, const std::string& svg_path, std::ostream& out) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + csv + "'");
  const auto table = read_curves_csv(in, fs::path(csv).stem().string());
  const std::string comment = table.comments.empty() ? std::string("rendered from " + fs::path(csv).filename().string())
                                                     : table.comments.front();
  write_file(svg_path, render_svg(table.curves, comment));
  out << "wrote " << svg_path << " (" << table.curves.size() << " curves)\n";
  return kExitOk;
}

std::vector<std::string> manifest_args(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open manifest '" + path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("args") || !m["args"].is_array()) throw ParseError("manifest '" + path + "' lacks an args array");
  std::vector<std::string> args;
  for (const auto& a : m["args"]) {
    if (!a.is_string()) throw ParseError("manifest args must be strings");
    args.push_back(a.get<std::string>());
  }
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contextual bandit policies over classification oracles", "bandit-forge"};
  app.require_subcommand(1);

  SimulateOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Replay a multilabel dataset as a bandit problem");
  add_simulate_flags(*simulate, sim_opts);

  CoverageOptions cov_opts;
  auto* coverage = app.add_subcommand("coverage", "Upper-bound coverage study on synthetic data");
  coverage->add_option("--preset", cov_opts.preset, "linear-large-bias | logistic-independent | logistic-correlated")
      ->capture_default_str();
  coverage->add_option("--schemes", cov_opts.schemes, "Comma-separated weighting schemes (default all)");
  coverage->add_option("--sizes", cov_opts.sizes, "Sample sizes (default: 16-point grid 10..10000)")->delimiter(',');
  coverage->add_option("--n-samples", cov_opts.n_samples, "Samples per size")->capture_default_str();
  coverage->add_option("--resamples", cov_opts.resamples, "Resamples per sample")->capture_default_str();
  coverage->add_option("--percentile", cov_opts.percentile, "Bound percentile")->capture_default_str();
  coverage->add_option("--n-test", cov_opts.n_test, "Test points")->capture_default_str();
  coverage->add_option("--seed", cov_opts.seed, "Seed (falls back to BANDIT_FORGE_SEED, then 0)");
  coverage->add_option("--jobs", cov_opts.jobs, "Worker threads")->capture_default_str();
  coverage->add_option("--out", cov_opts.out, "Output directory")->capture_default_str();

  std::string info_path;
  int info_label_base = 0;
  int info_feature_base = 0;
  bool info_json = false;
  auto* info = app.add_subcommand("dataset-info", "Print dataset statistics");
  info->add_option("dataset", info_path, "Dataset path")->required();
  info->add_option("--label-base", info_label_base, "First label index (0 or 1)")->capture_default_str();
  info->add_option("--feature-base", info_feature_base, "First feature index (0 or 1)")->capture_default_str();
  info->add_flag("--json", info_json, "JSON output");

  std::string svg_csv;
  std::string svg_out;
  auto* svg = app.add_subcommand("render-svg", "Line chart of cumulative mean reward from a simulate CSV");
  svg->add_option("--csv", svg_csv, "Input CSV")->required();
  svg->add_option("--out", svg_out, "Output SVG")->required();

  std::string manifest_path;
  std::optional<std::string> rerun_out;
  auto* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a manifest.json");
  rerun->add_option("--manifest", manifest_path, "manifest.json written by simulate or coverage")->required();
  rerun->add_option("--out", rerun_out, "Output directory for the repeat")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*rerun) {
      auto replay = manifest_args(manifest_path);
      replay.push_back("--out");
      replay.push_back(*rerun_out);
      return run_cli(replay, out, err);
    }
    // The manifest pins the resolved seed so a rerun ignores the environment.
    auto recorded = without_out(args);
    if (*simulate || *coverage) {
      const auto& seed_flag = *simulate ? sim_opts.seed : cov_opts.seed;
      if (!seed_flag) {
        recorded.push_back("--seed");
        recorded.push_back(std::to_string(resolve_seed(std::nullopt)));
      }
    }
    if (*simulate) return simulate_command(sim_opts, recorded, out);
    if (*coverage) return coverage_command(cov_opts, recorded, out);
    if (*info) return dataset_info_command(info_path, info_label_base, info_feature_base, info_json, out);
    if (*svg) return render_svg_command(svg_csv, svg_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SubsetTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace bforge
