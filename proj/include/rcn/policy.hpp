#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace rcn {

/// Policy architectures. Scn = linear map + MLP, summed; Rcn = linear map +
/// vanilla RNN, summed.
enum class PolicyKind { Linear, Mlp, Rnn, Gru, Lstm, Scn, Rcn };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// Architecture descriptor. `hidden_size` is the recurrent width for
/// Rnn/Gru/Lstm/Rcn and the hidden width of the (inner) MLP for Mlp/Scn.
/// `num_hidden_layers` applies to Mlp and the Scn inner MLP only.
struct PolicySpec {
  PolicyKind kind = PolicyKind::Rnn;
  int hidden_size = 32;
  int num_hidden_layers = 2;
  bool biases_enabled = false;
  int obs_dim = 1;
  int act_dim = 1;

  /// Throws std::invalid_argument if any dimension is < 1.
  void validate() const;

  /// Linear, Mlp and Scn act on the current observation only.
  bool is_stateless() const;
  bool is_recurrent() const { return !is_stateless(); }
};

/// Submodule descriptors for the composite architectures (Scn, Rcn).
PolicySpec linear_submodule(const PolicySpec& spec);
PolicySpec nonlinear_submodule(const PolicySpec& spec);

/// Short label such as "rnn32" or "mlp64" (hidden width omitted for Linear).
std::string policy_label(const PolicySpec& spec);

/// One named block of the flat parameter vector. Matrices are stored
/// row-major (row r holds the input weights of output unit r); bias blocks
/// have cols == 1.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool is_bias = false;
  std::int64_t offset = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(rows) * cols; }
};

/// Flat layout contract. Per architecture, weight matrices come first in the
/// order they enter the update equations, then bias vectors in the same order
/// (bias blocks exist only when biases_enabled):
///
///   Linear: K(act,obs); b(act)
///   Mlp:    W1(h,obs), W2(h,h) ... WL(h,h), W_out(act,h); b1..bL(h), b_out(act)
///   Rnn:    W_x(h,obs), W_h(h,h), W_o(act,h); b_h(h), b_o(act)
///   Gru:    W_ux(h,obs), W_uh(h,h), W_rx(h,obs), W_rh(h,h),
///           W_hx(h,obs), W_hh(h,h), W_o(act,h); b_u(h), b_r(h), b_h(h), b_o(act)
///   Lstm:   W_fx(h,obs), W_fh(h,h), W_ix(h,obs), W_ih(h,h),
///           W_ox(h,obs), W_oh(h,h), W_cx(h,obs), W_ch(h,h), W_out(act,h);
///           b_f(h), b_i(h), b_o(h), b_c(h), b_out(act)
///   Scn:    the full Linear layout (prefix "lin."), then the full Mlp layout
///           (prefix "mlp.")
///   Rcn:    the full Linear layout (prefix "lin."), then the full Rnn layout
///           (prefix "rnn.")
///
/// This order is a file-format contract (checkpoints store values in layout
/// order) and must not change.
std::vector<ParamBlock> param_layout(const PolicySpec& spec);

/// Closed-form total parameter count for the layout above.
std::int64_t param_count(const PolicySpec& spec);

/// Recurrent policy state. `cell` is used by Lstm only (size 0 otherwise);
/// stateless architectures carry empty vectors.
struct RecurrentState {
  Eigen::VectorXd hidden;
  Eigen::VectorXd cell;
};

/// Reset state: all zeros.
RecurrentState zero_state(const PolicySpec& spec);

struct ForwardResult {
  Eigen::VectorXd action;
  RecurrentState state;
};

/// Forward passes. All are pure: identical arguments give bit-identical
/// results, and the input state is never modified. Dimension mismatches
/// throw std::invalid_argument.
Eigen::VectorXd forward_linear(const PolicySpec& spec,
                               const Eigen::Ref<const Eigen::VectorXd>& params,
                               const Eigen::Ref<const Eigen::VectorXd>& obs);
Eigen::VectorXd forward_mlp(const PolicySpec& spec,
                            const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::Ref<const Eigen::VectorXd>& obs);
Eigen::VectorXd forward_scn(const PolicySpec& spec,
                            const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::Ref<const Eigen::VectorXd>& obs);
ForwardResult forward_rnn(const PolicySpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const RecurrentState& state,
                          const Eigen::Ref<const Eigen::VectorXd>& obs);
ForwardResult forward_gru(const PolicySpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const RecurrentState& state,
                          const Eigen::Ref<const Eigen::VectorXd>& obs);
ForwardResult forward_lstm(const PolicySpec& spec,
                           const Eigen::Ref<const Eigen::VectorXd>& params,
                           const RecurrentState& state,
                           const Eigen::Ref<const Eigen::VectorXd>& obs);
ForwardResult forward_rcn(const PolicySpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const RecurrentState& state,
                          const Eigen::Ref<const Eigen::VectorXd>& obs);

/// Dispatch on spec.kind. Stateless kinds return an unchanged copy of the
/// input state.
ForwardResult forward(const PolicySpec& spec,
                      const Eigen::Ref<const Eigen::VectorXd>& params,
                      const RecurrentState& state,
                      const Eigen::Ref<const Eigen::VectorXd>& obs);

/// Seeded initial parameters: each weight ~ Normal(0, 1/sqrt(fan_in)) with
/// fan_in the matrix column count, biases zero. Draw order is layout order.
Eigen::VectorXd init_params(const PolicySpec& spec, std::uint64_t seed);

/// A live policy: spec + flat parameters + recurrent state.
class Policy {
 public:
  /// build_policy: deterministic seeded initialization, zeroed state.
  Policy(const PolicySpec& spec, std::uint64_t seed);

  /// Wraps existing parameters (length must equal param_count(spec)).
  Policy(const PolicySpec& spec, Eigen::VectorXd params);

  const PolicySpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  const Eigen::VectorXd& get_flat() const { return params_; }
  void set_flat(const Eigen::Ref<const Eigen::VectorXd>& values);

  /// Zeroes hidden (and cell) state. Call at every environment reset.
  void reset_state();
  const RecurrentState& state() const { return state_; }

  /// One control step: returns the action and advances the recurrent state.
  Eigen::VectorXd act(const Eigen::Ref<const Eigen::VectorXd>& obs);

 private:
  PolicySpec spec_;
  std::uint64_t seed_ = 0;
  Eigen::VectorXd params_;
  RecurrentState state_;
};

}  // namespace rcn
