#pragma once

#include "rcn/env.hpp"
#include "rcn/es.hpp"
#include "rcn/policy.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rcn {

struct RolloutResult {
  double episodic_reward = 0.0;
  std::int64_t steps = 0;
  std::vector<Eigen::VectorXd> actions;  // filled iff record_actions
};

struct RolloutOptions {
  bool record_actions = false;
  bool normalize_obs = false;
};

/// One episode: resets the policy state and the environment (with env_seed),
/// then steps until done or max_steps. Throws std::invalid_argument when the
/// policy and environment dimensions disagree.
RolloutResult rollout(Policy& policy, Environment& env, std::uint64_t env_seed,
                      std::int64_t max_steps, const RolloutOptions& options = {});

/// One trial's training trace, as produced by train() under a given seed.
struct TrialCurve {
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> records;

  double final_eval() const;
};

/// Median-of-trials reduction: trials are ranked by final eval reward
/// (ties broken by lower seed) and the middle n_median — ranks
/// floor((n_total - n_median) / 2) + 1 .. + n_median, 1-based ascending —
/// are kept; their eval curves are averaged pointwise.
struct TrialAggregate {
  std::vector<std::int64_t> env_steps;          // x-axis, shared across trials
  std::vector<double> per_generation_curve;     // averaged eval rewards
  std::vector<int> selected_trials;             // indices into the input list
  int n_total = 0;
  int n_median = 0;
};

/// Protocol core, separated from training so it can be exercised on
/// synthetic curves. All input curves must have equal length.
TrialAggregate aggregate_trials(const std::vector<TrialCurve>& trials, int n_median);

struct ExperimentConfig {
  EnvSpec env;
  PolicySpec policy;
  EsConfig es;
  int n_total = 10;
  int n_median = 5;
  std::int64_t step_budget = 200000;
  int n_threads = 1;

  void validate() const;
};

/// Runs n_total independent trainings with seeds es.seed + 0 .. + (n_total-1)
/// and reduces them with aggregate_trials. Also returns the raw curves.
struct ProtocolResult {
  std::vector<TrialCurve> trials;
  TrialAggregate aggregate;
};
ProtocolResult run_trials(const ExperimentConfig& config);

struct ComparisonRow {
  std::string policy;
  double final_avg_reward = 0.0;
};

/// One aggregate per architecture under a shared protocol; reports final
/// averaged rewards without judging them.
struct ComparisonResult {
  std::vector<ComparisonRow> table;
  std::vector<ProtocolResult> per_policy;
};
ComparisonResult compare_architectures(const ExperimentConfig& base,
                                       const std::vector<PolicySpec>& policies);

/// Same protocol run twice with biases_enabled forced on, then off,
/// under identical seeds.
struct AblationResult {
  ProtocolResult bias_on;
  ProtocolResult bias_off;
};
AblationResult bias_ablation(const ExperimentConfig& base);

/// CSV emitters. Schemas:
///   training log: generation,env_steps,reward_mean,reward_max,eval_reward
///   aggregate:    generation,env_steps,avg_eval_reward
///   comparison:   policy,final_avg_reward
///   ablation:     generation,env_steps,bias_on,bias_off
void write_training_log_csv(const std::string& path,
                            const std::vector<GenerationRecord>& records);
void write_aggregate_csv(const std::string& path, const TrialAggregate& aggregate);
void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& table);
void write_ablation_csv(const std::string& path, const AblationResult& result);

}  // namespace rcn
