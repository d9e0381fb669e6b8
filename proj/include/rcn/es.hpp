#pragma once

#include "rcn/env.hpp"
#include "rcn/policy.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace rcn {

/// Evolution Strategies hyperparameters. Population per generation is
/// 2 * n_pairs (antithetic pairs).
struct EsConfig {
  int n_pairs = 32;
  double sigma = 0.05;
  double lr = 0.03;
  int generations = 1000;
  std::uint64_t seed = 0;
  /// Per-episode running observation normalization inside rollouts.
  /// Off by default; runs are bit-reproducible either way.
  bool normalize_obs = false;

  void validate() const;
};

struct GenerationRecord {
  int generation = 0;
  std::int64_t env_steps_cumulative = 0;  // perturbation-rollout steps only
  double reward_mean = 0.0;
  double reward_max = 0.0;
  double eval_reward = 0.0;  // unperturbed rollout after the update
};

/// 2*n_pairs unit-normal noise vectors: entries of vector i < n_pairs come
/// from the stream derived from (seed, generation, i); vector n_pairs + i is
/// the exact negation of vector i. Results do not depend on evaluation
/// scheduling. Perturbed parameters are theta + sigma * noise; sigma scaling
/// and the update denominator live with the caller.
std::vector<Eigen::VectorXd> sample_perturbations(std::uint64_t seed, int generation,
                                                  int n_pairs, int dim);

/// Centered-rank utilities: rank/(N-1) - 0.5 with ranks ascending in reward
/// and ties given their average rank. Invariant under strictly increasing
/// reward transforms; all-equal rewards give all-zero utilities.
/// Throws std::invalid_argument when fewer than 2 rewards are given.
std::vector<double> shape_fitness(const std::vector<double>& rewards);

/// theta' = theta + lr / (2 * n_pairs * sigma) * sum_j utility_j * noise_j.
/// The sum is accumulated pairwise (pair i with its antithetic partner
/// n_pairs + i) so equal utilities within a pair cancel exactly.
Eigen::VectorXd es_update(const Eigen::VectorXd& params,
                          const std::vector<Eigen::VectorXd>& noises,
                          const std::vector<double>& utilities, const EsConfig& config);

struct TrainOptions {
  /// Total environment steps across all perturbation rollouts. Training
  /// always runs at least one generation, then starts a new generation only
  /// if its projected cost (2 * n_pairs * episode_length) still fits.
  std::int64_t step_budget = 200000;
  /// Rollouts within a generation run on this many threads. Results are
  /// identical for any value (per-perturbation streams, index-ordered
  /// reduction).
  int n_threads = 1;
  /// Starting parameters; defaults to build_policy(spec, config.seed).
  std::optional<Eigen::VectorXd> initial_params;
  /// Called after each generation with the record and the updated parameters.
  std::function<void(const GenerationRecord&, const Eigen::VectorXd&)> observer;
};

struct TrainResult {
  std::vector<GenerationRecord> records;
  Eigen::VectorXd final_params;
};

/// ES training loop: sample antithetic perturbations, evaluate one rollout
/// per perturbed parameter vector (env seeded per (seed, generation, index)),
/// shape fitness, update, then score the updated parameters with one
/// unperturbed rollout. Deterministic given (config, spec, env_spec, options).
TrainResult train(const EsConfig& config, const PolicySpec& policy_spec,
                  const EnvSpec& env_spec, const TrainOptions& options = {});

}  // namespace rcn
