#include "rcn/policy.hpp"

#include "rcn/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace rcn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<const RowMajor>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

Eigen::VectorXd tanh_of(const Eigen::VectorXd& z) { return z.array().tanh().matrix(); }

/// Read-only named-block access into a flat parameter vector.
class ParamView {
 public:
  ParamView(const PolicySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params)
      : blocks_(param_layout(spec)), data_(params.data()) {
    if (params.size() != param_count(spec)) {
      throw std::invalid_argument("parameter vector has length " +
                                  std::to_string(params.size()) + ", expected " +
                                  std::to_string(param_count(spec)));
    }
  }

  MatMap mat(std::string_view name) const {
    const ParamBlock& b = find(name);
    return MatMap(data_ + b.offset, b.rows, b.cols);
  }

  VecMap vec(std::string_view name) const {
    const ParamBlock& b = find(name);
    return VecMap(data_ + b.offset, b.size());
  }

 private:
  const ParamBlock& find(std::string_view name) const {
    for (const ParamBlock& b : blocks_) {
      if (b.name == name) return b;
    }
    throw std::logic_error("no parameter block named '" + std::string(name) + "'");
  }

  std::vector<ParamBlock> blocks_;
  const double* data_;
};

void check_obs(const PolicySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& obs) {
  if (obs.size() != spec.obs_dim) {
    throw std::invalid_argument("observation has length " + std::to_string(obs.size()) +
                                ", expected " + std::to_string(spec.obs_dim));
  }
}

void check_hidden(const PolicySpec& spec, const RecurrentState& state) {
  if (state.hidden.size() != spec.hidden_size) {
    throw std::invalid_argument("hidden state has length " +
                                std::to_string(state.hidden.size()) + ", expected " +
                                std::to_string(spec.hidden_size));
  }
}

void check_kind(const PolicySpec& spec, PolicyKind expected, const char* op) {
  if (spec.kind != expected) {
    throw std::invalid_argument(std::string(op) + " called with a " +
                                to_string(spec.kind) + " spec");
  }
}

struct LayoutBuilder {
  std::vector<ParamBlock> blocks;
  std::int64_t off = 0;

  void add(std::string name, int rows, int cols, bool is_bias = false) {
    ParamBlock b{std::move(name), rows, cols, is_bias, off};
    off += b.size();
    blocks.push_back(std::move(b));
  }
  void add_bias(std::string name, int n) { add(std::move(name), n, 1, true); }
};

void append_layout(LayoutBuilder& lb, const PolicySpec& spec, const std::string& prefix) {
  const int h = spec.hidden_size;
  const int obs = spec.obs_dim;
  const int act = spec.act_dim;

  switch (spec.kind) {
    case PolicyKind::Linear:
      lb.add(prefix + "K", act, obs);
      if (spec.biases_enabled) lb.add_bias(prefix + "b", act);
      break;

    case PolicyKind::Mlp: {
      const int layers = spec.num_hidden_layers;
      lb.add(prefix + "W1", h, obs);
      for (int k = 2; k <= layers; ++k) lb.add(prefix + "W" + std::to_string(k), h, h);
      lb.add(prefix + "W_out", act, h);
      if (spec.biases_enabled) {
        for (int k = 1; k <= layers; ++k) lb.add_bias(prefix + "b" + std::to_string(k), h);
        lb.add_bias(prefix + "b_out", act);
      }
      break;
    }

    case PolicyKind::Rnn:
      lb.add(prefix + "W_x", h, obs);
      lb.add(prefix + "W_h", h, h);
      lb.add(prefix + "W_o", act, h);
      if (spec.biases_enabled) {
        lb.add_bias(prefix + "b_h", h);
        lb.add_bias(prefix + "b_o", act);
      }
      break;

    case PolicyKind::Gru:
      lb.add(prefix + "W_ux", h, obs);
      lb.add(prefix + "W_uh", h, h);
      lb.add(prefix + "W_rx", h, obs);
      lb.add(prefix + "W_rh", h, h);
      lb.add(prefix + "W_hx", h, obs);
      lb.add(prefix + "W_hh", h, h);
      lb.add(prefix + "W_o", act, h);
      if (spec.biases_enabled) {
        lb.add_bias(prefix + "b_u", h);
        lb.add_bias(prefix + "b_r", h);
        lb.add_bias(prefix + "b_h", h);
        lb.add_bias(prefix + "b_o", act);
      }
      break;

    case PolicyKind::Lstm:
      lb.add(prefix + "W_fx", h, obs);
      lb.add(prefix + "W_fh", h, h);
      lb.add(prefix + "W_ix", h, obs);
      lb.add(prefix + "W_ih", h, h);
      lb.add(prefix + "W_ox", h, obs);
      lb.add(prefix + "W_oh", h, h);
      lb.add(prefix + "W_cx", h, obs);
      lb.add(prefix + "W_ch", h, h);
      lb.add(prefix + "W_out", act, h);
      if (spec.biases_enabled) {
        lb.add_bias(prefix + "b_f", h);
        lb.add_bias(prefix + "b_i", h);
        lb.add_bias(prefix + "b_o", h);
        lb.add_bias(prefix + "b_c", h);
        lb.add_bias(prefix + "b_out", act);
      }
      break;

    case PolicyKind::Scn:
    case PolicyKind::Rcn:
      throw std::logic_error("composite spec passed to append_layout");
  }
}

}  // namespace

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Linear: return "linear";
    case PolicyKind::Mlp: return "mlp";
    case PolicyKind::Rnn: return "rnn";
    case PolicyKind::Gru: return "gru";
    case PolicyKind::Lstm: return "lstm";
    case PolicyKind::Scn: return "scn";
    case PolicyKind::Rcn: return "rcn";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  for (PolicyKind k : {PolicyKind::Linear, PolicyKind::Mlp, PolicyKind::Rnn,
                       PolicyKind::Gru, PolicyKind::Lstm, PolicyKind::Scn,
                       PolicyKind::Rcn}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown policy kind '" + name + "'");
}

void PolicySpec::validate() const {
  if (hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
  if (num_hidden_layers < 1) throw std::invalid_argument("num_hidden_layers must be >= 1");
  if (obs_dim < 1) throw std::invalid_argument("obs_dim must be >= 1");
  if (act_dim < 1) throw std::invalid_argument("act_dim must be >= 1");
}

bool PolicySpec::is_stateless() const {
  return kind == PolicyKind::Linear || kind == PolicyKind::Mlp || kind == PolicyKind::Scn;
}

PolicySpec linear_submodule(const PolicySpec& spec) {
  PolicySpec sub = spec;
  sub.kind = PolicyKind::Linear;
  return sub;
}

PolicySpec nonlinear_submodule(const PolicySpec& spec) {
  PolicySpec sub = spec;
  switch (spec.kind) {
    case PolicyKind::Scn: sub.kind = PolicyKind::Mlp; break;
    case PolicyKind::Rcn: sub.kind = PolicyKind::Rnn; break;
    default:
      throw std::invalid_argument("nonlinear_submodule: spec is not composite");
  }
  return sub;
}

std::string policy_label(const PolicySpec& spec) {
  if (spec.kind == PolicyKind::Linear) return "linear";
  return std::string(to_string(spec.kind)) + std::to_string(spec.hidden_size);
}

std::vector<ParamBlock> param_layout(const PolicySpec& spec) {
  spec.validate();
  LayoutBuilder lb;
  if (spec.kind == PolicyKind::Scn || spec.kind == PolicyKind::Rcn) {
    append_layout(lb, linear_submodule(spec), "lin.");
    append_layout(lb, nonlinear_submodule(spec),
                  spec.kind == PolicyKind::Scn ? "mlp." : "rnn.");
  } else {
    append_layout(lb, spec, "");
  }
  return lb.blocks;
}

std::int64_t param_count(const PolicySpec& spec) {
  spec.validate();
  const std::int64_t h = spec.hidden_size;
  const std::int64_t obs = spec.obs_dim;
  const std::int64_t act = spec.act_dim;
  const std::int64_t layers = spec.num_hidden_layers;
  const bool b = spec.biases_enabled;

  switch (spec.kind) {
    case PolicyKind::Linear:
      return act * obs + (b ? act : 0);
    case PolicyKind::Mlp:
      return h * obs + (layers - 1) * h * h + act * h + (b ? layers * h + act : 0);
    case PolicyKind::Rnn:
      return h * obs + h * h + act * h + (b ? h + act : 0);
    case PolicyKind::Gru:
      return 3 * (h * obs + h * h) + act * h + (b ? 3 * h + act : 0);
    case PolicyKind::Lstm:
      return 4 * (h * obs + h * h) + act * h + (b ? 4 * h + act : 0);
    case PolicyKind::Scn:
      return param_count(linear_submodule(spec)) + param_count(nonlinear_submodule(spec));
    case PolicyKind::Rcn:
      return param_count(linear_submodule(spec)) + param_count(nonlinear_submodule(spec));
  }
  throw std::logic_error("unreachable policy kind");
}

RecurrentState zero_state(const PolicySpec& spec) {
  RecurrentState s;
  if (spec.is_recurrent()) s.hidden = Eigen::VectorXd::Zero(spec.hidden_size);
  if (spec.kind == PolicyKind::Lstm) s.cell = Eigen::VectorXd::Zero(spec.hidden_size);
  return s;
}

Eigen::VectorXd forward_linear(const PolicySpec& spec,
                               const Eigen::Ref<const Eigen::VectorXd>& params,
                               const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Linear, "forward_linear");
  check_obs(spec, obs);
  ParamView p(spec, params);
  Eigen::VectorXd action = p.mat("K") * obs;
  if (spec.biases_enabled) action += p.vec("b");
  return action;
}

Eigen::VectorXd forward_mlp(const PolicySpec& spec,
                            const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Mlp, "forward_mlp");
  check_obs(spec, obs);
  ParamView p(spec, params);
  Eigen::VectorXd a = obs;
  for (int k = 1; k <= spec.num_hidden_layers; ++k) {
    const std::string idx = std::to_string(k);
    Eigen::VectorXd pre = p.mat("W" + idx) * a;
    if (spec.biases_enabled) pre += p.vec("b" + idx);
    a = tanh_of(pre);
  }
  Eigen::VectorXd action = p.mat("W_out") * a;
  if (spec.biases_enabled) action += p.vec("b_out");
  return action;
}

ForwardResult forward_rnn(const PolicySpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const RecurrentState& state,
                          const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Rnn, "forward_rnn");
  check_obs(spec, obs);
  check_hidden(spec, state);
  ParamView p(spec, params);

  Eigen::VectorXd pre = p.mat("W_x") * obs + p.mat("W_h") * state.hidden;
  if (spec.biases_enabled) pre += p.vec("b_h");
  ForwardResult r;
  r.state.hidden = tanh_of(pre);
  r.action = p.mat("W_o") * r.state.hidden;
  if (spec.biases_enabled) r.action += p.vec("b_o");
  return r;
}

ForwardResult forward_gru(const PolicySpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const RecurrentState& state,
                          const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Gru, "forward_gru");
  check_obs(spec, obs);
  check_hidden(spec, state);
  ParamView p(spec, params);

  Eigen::VectorXd u_pre = p.mat("W_ux") * obs + p.mat("W_uh") * state.hidden;
  Eigen::VectorXd r_pre = p.mat("W_rx") * obs + p.mat("W_rh") * state.hidden;
  Eigen::VectorXd c_pre = p.mat("W_hx") * obs + p.mat("W_hh") * state.hidden;
  if (spec.biases_enabled) {
    u_pre += p.vec("b_u");
    r_pre += p.vec("b_r");
    c_pre += p.vec("b_h");
  }
  const Eigen::VectorXd u = sigmoid(u_pre);
  // The reset gate is part of the cell definition but does not enter the
  // candidate; the update below uses the candidate on the raw previous state.
  const Eigen::VectorXd r_gate = sigmoid(r_pre);
  (void)r_gate;
  const Eigen::VectorXd cand = tanh_of(c_pre);

  ForwardResult out;
  out.state.hidden =
      (u.array() * state.hidden.array() + (1.0 - u.array()) * cand.array()).matrix();
  out.action = p.mat("W_o") * out.state.hidden;
  if (spec.biases_enabled) out.action += p.vec("b_o");
  return out;
}

ForwardResult forward_lstm(const PolicySpec& spec,
                           const Eigen::Ref<const Eigen::VectorXd>& params,
                           const RecurrentState& state,
                           const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Lstm, "forward_lstm");
  check_obs(spec, obs);
  check_hidden(spec, state);
  if (state.cell.size() != spec.hidden_size) {
    throw std::invalid_argument("cell state has length " +
                                std::to_string(state.cell.size()) + ", expected " +
                                std::to_string(spec.hidden_size));
  }
  ParamView p(spec, params);

  Eigen::VectorXd f_pre = p.mat("W_fx") * obs + p.mat("W_fh") * state.hidden;
  Eigen::VectorXd i_pre = p.mat("W_ix") * obs + p.mat("W_ih") * state.hidden;
  Eigen::VectorXd o_pre = p.mat("W_ox") * obs + p.mat("W_oh") * state.hidden;
  Eigen::VectorXd c_pre = p.mat("W_cx") * obs + p.mat("W_ch") * state.hidden;
  if (spec.biases_enabled) {
    f_pre += p.vec("b_f");
    i_pre += p.vec("b_i");
    o_pre += p.vec("b_o");
    c_pre += p.vec("b_c");
  }
  const Eigen::VectorXd f = sigmoid(f_pre);
  const Eigen::VectorXd i = sigmoid(i_pre);
  const Eigen::VectorXd o = sigmoid(o_pre);
  const Eigen::VectorXd cand = tanh_of(c_pre);

  ForwardResult out;
  out.state.cell =
      (f.array() * state.cell.array() + i.array() * cand.array()).matrix();
  // Hidden exposure gates the *sigmoid* of the cell, not its tanh.
  out.state.hidden = (o.array() * sigmoid(out.state.cell).array()).matrix();
  out.action = p.mat("W_out") * out.state.hidden;
  if (spec.biases_enabled) out.action += p.vec("b_out");
  return out;
}

Eigen::VectorXd forward_scn(const PolicySpec& spec,
                            const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Scn, "forward_scn");
  const PolicySpec lin = linear_submodule(spec);
  const PolicySpec mlp = nonlinear_submodule(spec);
  const std::int64_t n_lin = param_count(lin);
  if (params.size() != param_count(spec)) {
    throw std::invalid_argument("parameter vector has length " +
                                std::to_string(params.size()) + ", expected " +
                                std::to_string(param_count(spec)));
  }
  return forward_linear(lin, params.head(n_lin), obs) +
         forward_mlp(mlp, params.tail(params.size() - n_lin), obs);
}

ForwardResult forward_rcn(const PolicySpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& params,
                          const RecurrentState& state,
                          const Eigen::Ref<const Eigen::VectorXd>& obs) {
  check_kind(spec, PolicyKind::Rcn, "forward_rcn");
  const PolicySpec lin = linear_submodule(spec);
  const PolicySpec rnn = nonlinear_submodule(spec);
  const std::int64_t n_lin = param_count(lin);
  if (params.size() != param_count(spec)) {
    throw std::invalid_argument("parameter vector has length " +
                                std::to_string(params.size()) + ", expected " +
                                std::to_string(param_count(spec)));
  }
  ForwardResult out = forward_rnn(rnn, params.tail(params.size() - n_lin), state, obs);
  out.action = forward_linear(lin, params.head(n_lin), obs) + out.action;
  return out;
}

ForwardResult forward(const PolicySpec& spec,
                      const Eigen::Ref<const Eigen::VectorXd>& params,
                      const RecurrentState& state,
                      const Eigen::Ref<const Eigen::VectorXd>& obs) {
  switch (spec.kind) {
    case PolicyKind::Linear:
      return {forward_linear(spec, params, obs), state};
    case PolicyKind::Mlp:
      return {forward_mlp(spec, params, obs), state};
    case PolicyKind::Scn:
      return {forward_scn(spec, params, obs), state};
    case PolicyKind::Rnn:
      return forward_rnn(spec, params, state, obs);
    case PolicyKind::Gru:
      return forward_gru(spec, params, state, obs);
    case PolicyKind::Lstm:
      return forward_lstm(spec, params, state, obs);
    case PolicyKind::Rcn:
      return forward_rcn(spec, params, state, obs);
  }
  throw std::logic_error("unreachable policy kind");
}

Eigen::VectorXd init_params(const PolicySpec& spec, std::uint64_t seed) {
  const std::vector<ParamBlock> blocks = param_layout(spec);
  Eigen::VectorXd v(param_count(spec));
  Rng rng(stream_seed(seed));
  for (const ParamBlock& b : blocks) {
    if (b.is_bias) {
      v.segment(b.offset, b.size()).setZero();
    } else {
      const double scale = 1.0 / std::sqrt(static_cast<double>(b.cols));
      for (std::int64_t i = 0; i < b.size(); ++i) v[b.offset + i] = scale * rng.normal();
    }
  }
  return v;
}

Policy::Policy(const PolicySpec& spec, std::uint64_t seed)
    : spec_(spec), seed_(seed), params_(init_params(spec, seed)), state_(zero_state(spec)) {}

Policy::Policy(const PolicySpec& spec, Eigen::VectorXd params)
    : spec_(spec), params_(std::move(params)), state_(zero_state(spec)) {
  spec_.validate();
  if (params_.size() != param_count(spec_)) {
    throw std::invalid_argument("parameter vector has length " +
                                std::to_string(params_.size()) + ", expected " +
                                std::to_string(param_count(spec_)));
  }
}

void Policy::set_flat(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() != params_.size()) {
    throw std::invalid_argument("set_flat: length " + std::to_string(values.size()) +
                                ", expected " + std::to_string(params_.size()));
  }
  params_ = values;
}

void Policy::reset_state() { state_ = zero_state(spec_); }

Eigen::VectorXd Policy::act(const Eigen::Ref<const Eigen::VectorXd>& obs) {
  ForwardResult r = forward(spec_, params_, state_, obs);
  state_ = std::move(r.state);
  return r.action;
}

}  // namespace rcn
