#include "rcn/es.hpp"

#include "rcn/harness.hpp"
#include "rcn/rng.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace rcn {

namespace {

// Domain separation for the derived streams: perturbation noise uses the raw
// seed, rollout envs and the eval env get their own tags.
constexpr std::uint64_t kEnvTag = 0x726f6c6c6f757421ULL;
constexpr std::uint64_t kEvalTag = 0x6576616c75617465ULL;

/// Runs fn(0..n-1), interleaved across up to n_threads threads. Callers index
/// into preallocated output slots, so scheduling cannot affect results.
void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
  if (n_threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(n_threads, n);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void EsConfig::validate() const {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
  if (lr <= 0.0) throw std::invalid_argument("lr must be > 0");
  if (generations < 1) throw std::invalid_argument("generations must be >= 1");
}

std::vector<Eigen::VectorXd> sample_perturbations(std::uint64_t seed, int generation,
                                                  int n_pairs, int dim) {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  std::vector<Eigen::VectorXd> noise(2 * static_cast<std::size_t>(n_pairs));
  for (int i = 0; i < n_pairs; ++i) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(generation),
                        static_cast<std::uint64_t>(i)));
    Eigen::VectorXd eps(dim);
    for (int d = 0; d < dim; ++d) eps[d] = rng.normal();
    noise[static_cast<std::size_t>(n_pairs) + i] = -eps;
    noise[i] = std::move(eps);
  }
  return noise;
}

std::vector<double> shape_fitness(const std::vector<double>& rewards) {
  const int n = static_cast<int>(rewards.size());
  if (n < 2) throw std::invalid_argument("shape_fitness needs at least 2 rewards");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rewards[a] != rewards[b]) return rewards[a] < rewards[b];
    return a < b;
  });

  // ascending ranks, ties sharing their average rank
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && rewards[order[j]] == rewards[order[i]]) ++j;
    const double avg = 0.5 * (i + j - 1);
    for (int k = i; k < j; ++k) rank[order[k]] = avg;
    i = j;
  }

  std::vector<double> utilities(n);
  for (int k = 0; k < n; ++k) utilities[k] = rank[k] / (n - 1) - 0.5;
  return utilities;
}

Eigen::VectorXd es_update(const Eigen::VectorXd& params,
                          const std::vector<Eigen::VectorXd>& noises,
                          const std::vector<double>& utilities, const EsConfig& config) {
  config.validate();
  const std::size_t pop = 2 * static_cast<std::size_t>(config.n_pairs);
  if (noises.size() != pop) {
    throw std::invalid_argument("es_update: expected " + std::to_string(pop) +
                                " noise vectors, got " + std::to_string(noises.size()));
  }
  if (utilities.size() != pop) {
    throw std::invalid_argument("es_update: expected " + std::to_string(pop) +
                                " utilities, got " + std::to_string(utilities.size()));
  }
  for (const Eigen::VectorXd& eps : noises) {
    if (eps.size() != params.size()) {
      throw std::invalid_argument("es_update: noise dimension mismatch");
    }
  }

  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(params.size());
  for (int i = 0; i < config.n_pairs; ++i) {
    weighted += utilities[i] * noises[i] +
                utilities[i + config.n_pairs] * noises[i + config.n_pairs];
  }
  const double scale = config.lr / (static_cast<double>(pop) * config.sigma);
  return params + scale * weighted;
}

TrainResult train(const EsConfig& config, const PolicySpec& policy_spec,
                  const EnvSpec& env_spec, const TrainOptions& options) {
  config.validate();
  policy_spec.validate();
  env_spec.validate();
  if (options.step_budget < 1) throw std::invalid_argument("step_budget must be >= 1");

  const std::unique_ptr<Environment> probe = make_environment(env_spec);
  if (policy_spec.obs_dim != probe->obs_dim() || policy_spec.act_dim != probe->act_dim()) {
    throw std::invalid_argument(
        "policy dims (" + std::to_string(policy_spec.obs_dim) + "," +
        std::to_string(policy_spec.act_dim) + ") do not match environment dims (" +
        std::to_string(probe->obs_dim()) + "," + std::to_string(probe->act_dim()) + ")");
  }
  const std::int64_t episode_len = probe->episode_length();

  const int dim = static_cast<int>(param_count(policy_spec));
  Eigen::VectorXd theta;
  if (options.initial_params) {
    if (options.initial_params->size() != dim) {
      throw std::invalid_argument("initial_params has length " +
                                  std::to_string(options.initial_params->size()) +
                                  ", expected " + std::to_string(dim));
    }
    theta = *options.initial_params;
  } else {
    theta = init_params(policy_spec, config.seed);
  }

  const int pop = 2 * config.n_pairs;
  const std::int64_t projected_per_gen = static_cast<std::int64_t>(pop) * episode_len;
  const RolloutOptions ropts{false, config.normalize_obs};

  TrainResult result;
  std::int64_t steps_total = 0;

  for (int g = 0; g < config.generations; ++g) {
    // Always run generation 0; afterwards start a generation only if its
    // projected cost still fits the budget (episodes are fixed-length).
    if (g > 0 && steps_total + projected_per_gen > options.step_budget) break;

    const std::vector<Eigen::VectorXd> noises =
        sample_perturbations(config.seed, g, config.n_pairs, dim);

    std::vector<double> rewards(pop);
    std::vector<std::int64_t> rollout_steps(pop);
    parallel_for(pop, options.n_threads, [&](int j) {
      Policy policy(policy_spec, theta + config.sigma * noises[j]);
      const std::unique_ptr<Environment> env = make_environment(env_spec);
      const RolloutResult rr =
          rollout(policy, *env,
                  stream_seed(config.seed ^ kEnvTag, static_cast<std::uint64_t>(g),
                              static_cast<std::uint64_t>(j)),
                  episode_len, ropts);
      rewards[j] = rr.episodic_reward;
      rollout_steps[j] = rr.steps;
    });
    for (int j = 0; j < pop; ++j) steps_total += rollout_steps[j];

    const std::vector<double> utilities = shape_fitness(rewards);
    theta = es_update(theta, noises, utilities, config);
    if (!theta.allFinite()) {
      throw std::runtime_error("parameters became non-finite at generation " +
                               std::to_string(g));
    }

    Policy eval_policy(policy_spec, theta);
    const std::unique_ptr<Environment> eval_env = make_environment(env_spec);
    const RolloutResult eval_rr =
        rollout(eval_policy, *eval_env,
                stream_seed(config.seed ^ kEvalTag, static_cast<std::uint64_t>(g), 0),
                episode_len, ropts);

    GenerationRecord rec;
    rec.generation = g;
    rec.env_steps_cumulative = steps_total;
    double sum = 0.0;
    double best = rewards[0];
    for (int j = 0; j < pop; ++j) {
      sum += rewards[j];
      if (rewards[j] > best) best = rewards[j];
    }
    rec.reward_mean = sum / pop;
    rec.reward_max = best;
    rec.eval_reward = eval_rr.episodic_reward;
    result.records.push_back(rec);
    if (options.observer) options.observer(rec, theta);
  }

  result.final_params = std::move(theta);
  return result;
}

}  // namespace rcn
