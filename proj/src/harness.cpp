#include "rcn/harness.hpp"

#include "rcn/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace rcn {

RolloutResult rollout(Policy& policy, Environment& env, std::uint64_t env_seed,
                      std::int64_t max_steps, const RolloutOptions& options) {
  if (policy.spec().obs_dim != env.obs_dim() || policy.spec().act_dim != env.act_dim()) {
    throw std::invalid_argument(
        "policy dims (" + std::to_string(policy.spec().obs_dim) + "," +
        std::to_string(policy.spec().act_dim) + ") do not match environment dims (" +
        std::to_string(env.obs_dim()) + "," + std::to_string(env.act_dim()) + ")");
  }

  policy.reset_state();
  Eigen::VectorXd obs = env.reset(env_seed);

  // Welford running statistics, reset per episode so rollouts stay pure.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(env.obs_dim());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(env.obs_dim());
  std::int64_t count = 0;

  RolloutResult out;
  for (std::int64_t s = 0; s < max_steps; ++s) {
    Eigen::VectorXd input = obs;
    if (options.normalize_obs) {
      ++count;
      const Eigen::VectorXd delta = obs - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta.cwiseProduct(obs - mean);
      const Eigen::VectorXd var = m2 / static_cast<double>(count);
      input = (obs - mean).cwiseQuotient((var.array() + 1e-8).sqrt().matrix());
    }
    Eigen::VectorXd action = policy.act(input);
    StepResult sr = env.step(action);
    out.episodic_reward += sr.reward;
    ++out.steps;
    if (options.record_actions) out.actions.push_back(std::move(action));
    if (sr.done) break;
    obs = std::move(sr.observation);
  }
  return out;
}

double TrialCurve::final_eval() const {
  if (records.empty()) throw std::logic_error("trial has no generation records");
  return records.back().eval_reward;
}

TrialAggregate aggregate_trials(const std::vector<TrialCurve>& trials, int n_median) {
  const int n_total = static_cast<int>(trials.size());
  if (n_total < 1) throw std::invalid_argument("aggregate_trials: no trials given");
  if (n_median < 1 || n_median > n_total) {
    throw std::invalid_argument("aggregate_trials: n_median must be in [1, n_total]");
  }
  const std::size_t len = trials[0].records.size();
  if (len == 0) throw std::invalid_argument("aggregate_trials: empty trial curve");
  for (const TrialCurve& t : trials) {
    if (t.records.size() != len) {
      throw std::invalid_argument("aggregate_trials: trial curves differ in length");
    }
  }

  // rank by final eval reward, ties by lower seed
  std::vector<int> order(n_total);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = trials[a].final_eval();
    const double fb = trials[b].final_eval();
    if (fa != fb) return fa < fb;
    return trials[a].seed < trials[b].seed;
  });

  const int lo = (n_total - n_median) / 2;
  std::vector<int> selected(order.begin() + lo, order.begin() + lo + n_median);
  std::sort(selected.begin(), selected.end());  // fixed summation order

  TrialAggregate agg;
  agg.n_total = n_total;
  agg.n_median = n_median;
  agg.selected_trials = selected;
  agg.env_steps.reserve(len);
  agg.per_generation_curve.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    agg.env_steps.push_back(trials[0].records[t].env_steps_cumulative);
    double sum = 0.0;
    for (int k : selected) sum += trials[k].records[t].eval_reward;
    agg.per_generation_curve.push_back(sum / n_median);
  }
  return agg;
}

void ExperimentConfig::validate() const {
  env.validate();
  policy.validate();
  es.validate();
  if (n_total < 1) throw std::invalid_argument("n_total must be >= 1");
  if (n_median < 1 || n_median > n_total) {
    throw std::invalid_argument("n_median must be in [1, n_total]");
  }
  if (step_budget < 1) throw std::invalid_argument("step_budget must be >= 1");
  if (n_threads < 1) throw std::invalid_argument("n_threads must be >= 1");
}

ProtocolResult run_trials(const ExperimentConfig& config) {
  config.validate();
  ProtocolResult out;
  out.trials.reserve(config.n_total);
  for (int k = 0; k < config.n_total; ++k) {
    EsConfig es = config.es;
    es.seed = config.es.seed + static_cast<std::uint64_t>(k);
    TrainOptions topt;
    topt.step_budget = config.step_budget;
    topt.n_threads = config.n_threads;
    try {
      TrainResult tr = train(es, config.policy, config.env, topt);
      out.trials.push_back(TrialCurve{es.seed, std::move(tr.records)});
    } catch (const std::exception& e) {
      throw std::runtime_error("trial with seed " + std::to_string(es.seed) +
                               " failed: " + e.what());
    }
  }
  out.aggregate = aggregate_trials(out.trials, config.n_median);
  return out;
}

ComparisonResult compare_architectures(const ExperimentConfig& base,
                                       const std::vector<PolicySpec>& policies) {
  if (policies.empty()) throw std::invalid_argument("compare_architectures: no policies");
  ComparisonResult out;
  for (const PolicySpec& spec : policies) {
    ExperimentConfig cfg = base;
    cfg.policy = spec;
    ProtocolResult pr = run_trials(cfg);
    ComparisonRow row;
    row.policy = policy_label(spec);
    row.final_avg_reward = pr.aggregate.per_generation_curve.back();
    out.table.push_back(std::move(row));
    out.per_policy.push_back(std::move(pr));
  }
  return out;
}

AblationResult bias_ablation(const ExperimentConfig& base) {
  AblationResult out;
  ExperimentConfig cfg = base;
  cfg.policy.biases_enabled = true;
  out.bias_on = run_trials(cfg);
  cfg.policy.biases_enabled = false;
  out.bias_off = run_trials(cfg);
  return out;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // fixed "\n" endings on all platforms
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

void finish_csv(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

void write_training_log_csv(const std::string& path,
                            const std::vector<GenerationRecord>& records) {
  std::ofstream f = open_csv(path);
  f << "generation,env_steps,reward_mean,reward_max,eval_reward\n";
  for (const GenerationRecord& r : records) {
    f << r.generation << ',' << r.env_steps_cumulative << ',' << format_g17(r.reward_mean)
      << ',' << format_g17(r.reward_max) << ',' << format_g17(r.eval_reward) << '\n';
  }
  finish_csv(f, path);
}

void write_aggregate_csv(const std::string& path, const TrialAggregate& aggregate) {
  std::ofstream f = open_csv(path);
  f << "generation,env_steps,avg_eval_reward\n";
  for (std::size_t t = 0; t < aggregate.per_generation_curve.size(); ++t) {
    f << t << ',' << aggregate.env_steps[t] << ','
      << format_g17(aggregate.per_generation_curve[t]) << '\n';
  }
  finish_csv(f, path);
}

void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& table) {
  std::ofstream f = open_csv(path);
  f << "policy,final_avg_reward\n";
  for (const ComparisonRow& row : table) {
    f << row.policy << ',' << format_g17(row.final_avg_reward) << '\n';
  }
  finish_csv(f, path);
}

void write_ablation_csv(const std::string& path, const AblationResult& result) {
  const TrialAggregate& on = result.bias_on.aggregate;
  const TrialAggregate& off = result.bias_off.aggregate;
  if (on.per_generation_curve.size() != off.per_generation_curve.size()) {
    throw std::invalid_argument("ablation curves differ in length");
  }
  std::ofstream f = open_csv(path);
  f << "generation,env_steps,bias_on,bias_off\n";
  for (std::size_t t = 0; t < on.per_generation_curve.size(); ++t) {
    f << t << ',' << on.env_steps[t] << ',' << format_g17(on.per_generation_curve[t])
      << ',' << format_g17(off.per_generation_curve[t]) << '\n';
  }
  finish_csv(f, path);
}

}  // namespace rcn
