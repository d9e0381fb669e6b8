#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>

namespace rcn {

/// Built-in deterministic tasks.
///
///   SilentOscillator  constant observation [1.0]; hidden target
///                     y*(t) = sin(2*pi*t/50); reward -|a_t - y*(t)|;
///                     action clipped to [-2, 2]. A policy only scores well
///                     by producing a rhythmic action from arrhythmic input.
///   PointMassSprint   velocity control: v' = v + dt*(a - 0.5*v), dt = 0.05,
///                     a clipped to [-1, 1]; obs [v]; reward v' - 0.01*a^2.
///   PendulumSwingUp   theta'' = (g/l)*sin(theta) - 0.1*theta' + a, g = 10,
///                     l = 1, a clipped to [-2, 2], semi-implicit Euler,
///                     dt = 0.05; obs [cos theta, sin theta, theta'];
///                     reward -(wrap(theta)^2 + 0.1*theta'^2 + 0.001*a^2)
///                     with wrap in (-pi, pi] and theta = 0 upright; starts
///                     hanging down (theta = pi).
///   QuadraticPseudoEnv one-step episode, obs [1.0], 10-dim action clipped
///                     to [-10, 10]; reward -|a|^2. Optimizer test fixture.
enum class EnvName { SilentOscillator, PointMassSprint, PendulumSwingUp, QuadraticPseudoEnv };

const char* to_string(EnvName name);
EnvName env_name_from_string(const std::string& name);

struct EnvSpec {
  EnvName name = EnvName::SilentOscillator;
  int episode_length = 200;
  double dt = 0.05;
  std::uint64_t seed = 0;
  /// Off by default: initial conditions are fixed constants. When on, tasks
  /// with physical state draw a small seeded offset at reset.
  bool init_jitter = false;

  void validate() const;
};

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool done = false;
};

/// Single-writer episodic environment. Dynamics are fully deterministic
/// given the reset seed; stepping a finished episode throws std::logic_error.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual int episode_length() const = 0;

  virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Eigen::Ref<const Eigen::VectorXd>& action) = 0;
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

/// Best achievable episodic reward over constant actions on SilentOscillator,
/// found by grid search over c in [-2, 2] with step 1e-3. Any policy whose
/// action depends only on the (constant) observation is capped by this value.
/// Throws std::invalid_argument for other environments.
double constant_action_bound(const EnvSpec& spec);

}  // namespace rcn
