#include "rcn/env.hpp"

#include "rcn/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rcn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clip(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double theta) {
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

class EnvBase : public Environment {
 public:
  explicit EnvBase(const EnvSpec& spec) : spec_(spec) {}

  int episode_length() const override { return spec_.episode_length; }

  Eigen::VectorXd reset(std::uint64_t seed) final {
    t_ = 0;
    reset_dynamics(seed);
    return observe();
  }

  StepResult step(const Eigen::Ref<const Eigen::VectorXd>& action) final {
    if (t_ >= episode_length()) throw std::logic_error("step called on a finished episode");
    if (action.size() != act_dim()) {
      throw std::invalid_argument("action has length " + std::to_string(action.size()) +
                                  ", expected " + std::to_string(act_dim()));
    }
    StepResult out;
    out.reward = advance(action);
    ++t_;
    out.observation = observe();
    out.done = t_ >= episode_length();
    return out;
  }

 protected:
  virtual void reset_dynamics(std::uint64_t seed) = 0;
  virtual double advance(const Eigen::Ref<const Eigen::VectorXd>& action) = 0;
  virtual Eigen::VectorXd observe() const = 0;

  const EnvSpec spec_;
  int t_ = 0;
};

class SilentOscillatorEnv final : public EnvBase {
 public:
  using EnvBase::EnvBase;
  int obs_dim() const override { return 1; }
  int act_dim() const override { return 1; }

 protected:
  void reset_dynamics(std::uint64_t) override {}

  double advance(const Eigen::Ref<const Eigen::VectorXd>& action) override {
    const double a = clip(action[0], -2.0, 2.0);
    const double target = std::sin(2.0 * kPi * t_ / 50.0);
    return -std::abs(a - target);
  }

  Eigen::VectorXd observe() const override {
    return Eigen::VectorXd::Constant(1, 1.0);  // constant beacon, no rhythm
  }
};

class PointMassSprintEnv final : public EnvBase {
 public:
  using EnvBase::EnvBase;
  int obs_dim() const override { return 1; }
  int act_dim() const override { return 1; }

 protected:
  void reset_dynamics(std::uint64_t seed) override {
    v_ = 0.0;
    if (spec_.init_jitter) v_ = 0.01 * Rng(stream_seed(seed)).uniform(-1.0, 1.0);
  }

  double advance(const Eigen::Ref<const Eigen::VectorXd>& action) override {
    const double a = clip(action[0], -1.0, 1.0);
    v_ = v_ + spec_.dt * (a - 0.5 * v_);
    return v_ - 0.01 * a * a;
  }

  Eigen::VectorXd observe() const override { return Eigen::VectorXd::Constant(1, v_); }

 private:
  double v_ = 0.0;
};

class PendulumSwingUpEnv final : public EnvBase {
 public:
  using EnvBase::EnvBase;
  int obs_dim() const override { return 3; }
  int act_dim() const override { return 1; }

 protected:
  void reset_dynamics(std::uint64_t seed) override {
    theta_ = kPi;  // hanging down; theta = 0 is upright
    theta_dot_ = 0.0;
    if (spec_.init_jitter) theta_ += 0.1 * Rng(stream_seed(seed)).uniform(-1.0, 1.0);
  }

  double advance(const Eigen::Ref<const Eigen::VectorXd>& action) override {
    const double a = clip(action[0], -2.0, 2.0);
    const double g_over_l = 10.0;
    const double accel = g_over_l * std::sin(theta_) - 0.1 * theta_dot_ + a;
    // semi-implicit Euler: velocity first, then position with the new velocity
    theta_dot_ += spec_.dt * accel;
    theta_ += spec_.dt * theta_dot_;
    const double w = wrap_angle(theta_);
    return -(w * w + 0.1 * theta_dot_ * theta_dot_ + 0.001 * a * a);
  }

  Eigen::VectorXd observe() const override {
    Eigen::VectorXd obs(3);
    obs << std::cos(theta_), std::sin(theta_), theta_dot_;
    return obs;
  }

 private:
  double theta_ = kPi;
  double theta_dot_ = 0.0;
};

class QuadraticPseudoEnv final : public EnvBase {
 public:
  explicit QuadraticPseudoEnv(const EnvSpec& spec) : EnvBase(spec) {}
  int obs_dim() const override { return 1; }
  int act_dim() const override { return 10; }
  int episode_length() const override { return 1; }

 protected:
  void reset_dynamics(std::uint64_t) override {}

  double advance(const Eigen::Ref<const Eigen::VectorXd>& action) override {
    double sq = 0.0;
    for (int i = 0; i < action.size(); ++i) {
      const double a = clip(action[i], -10.0, 10.0);
      sq += a * a;
    }
    return -sq;
  }

  Eigen::VectorXd observe() const override { return Eigen::VectorXd::Constant(1, 1.0); }
};

}  // namespace

const char* to_string(EnvName name) {
  switch (name) {
    case EnvName::SilentOscillator: return "silent-oscillator";
    case EnvName::PointMassSprint: return "point-mass-sprint";
    case EnvName::PendulumSwingUp: return "pendulum-swing-up";
    case EnvName::QuadraticPseudoEnv: return "quadratic-pseudo";
  }
  return "?";
}

EnvName env_name_from_string(const std::string& name) {
  for (EnvName e : {EnvName::SilentOscillator, EnvName::PointMassSprint,
                    EnvName::PendulumSwingUp, EnvName::QuadraticPseudoEnv}) {
    if (name == to_string(e)) return e;
  }
  throw std::invalid_argument("unknown environment '" + name + "'");
}

void EnvSpec::validate() const {
  if (episode_length < 1) throw std::invalid_argument("episode_length must be >= 1");
  if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
  spec.validate();
  switch (spec.name) {
    case EnvName::SilentOscillator: return std::make_unique<SilentOscillatorEnv>(spec);
    case EnvName::PointMassSprint: return std::make_unique<PointMassSprintEnv>(spec);
    case EnvName::PendulumSwingUp: return std::make_unique<PendulumSwingUpEnv>(spec);
    case EnvName::QuadraticPseudoEnv: return std::make_unique<QuadraticPseudoEnv>(spec);
  }
  throw std::invalid_argument("unknown environment name");
}

double constant_action_bound(const EnvSpec& spec) {
  if (spec.name != EnvName::SilentOscillator) {
    throw std::invalid_argument("constant_action_bound is defined for silent-oscillator only");
  }
  spec.validate();
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 4000; ++k) {
    const double c = -2.0 + k * 1e-3;
    double total = 0.0;
    for (int t = 0; t < spec.episode_length; ++t) {
      total -= std::abs(c - std::sin(2.0 * kPi * t / 50.0));
    }
    if (total > best) best = total;
  }
  return best;
}

}  // namespace rcn
