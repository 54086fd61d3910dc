#include "tomita/model.hpp"

#include <cmath>
#include <cstdlib>

#include "cells.hpp"
#include "tomita/rng.hpp"

namespace tomita {
namespace {

Tensor spec(std::string name, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return {std::move(name), std::move(shape), std::vector<double>(n, 0.0)};
}

void add_gate(std::vector<Tensor>& out, const std::string& g, std::size_t H) {
  out.push_back(spec("W_" + g, {H, 2}));
  out.push_back(spec("U_" + g, {H, H}));
  out.push_back(spec("b_" + g, {H}));
}

}  // namespace

std::string_view to_string(CellKind kind) noexcept {
  switch (kind) {
    case CellKind::elman: return "elman";
    case CellKind::second_order: return "second_order";
    case CellKind::mi_rnn: return "mi_rnn";
    case CellKind::gru: return "gru";
    case CellKind::lstm: return "lstm";
  }
  return "unknown";
}

CellKind parse_cell_kind(std::string_view text) {
  for (CellKind k : kAllCells) {
    if (to_string(k) == text) return k;
  }
  if (text == "2nd" || text == "second-order") return CellKind::second_order;
  if (text == "mi" || text == "mi-rnn") return CellKind::mi_rnn;
  throw InputError("unknown cell kind '" + std::string(text) + "'");
}

std::vector<Tensor> parameter_layout(CellKind kind, std::size_t H) {
  std::vector<Tensor> out;
  switch (kind) {
    case CellKind::elman:
      out.push_back(spec("W", {H, 2}));
      out.push_back(spec("U", {H, H}));
      out.push_back(spec("b", {H}));
      break;
    case CellKind::second_order:
      out.push_back(spec("T", {H, H, 2}));
      out.push_back(spec("b", {H}));
      break;
    case CellKind::mi_rnn:
      out.push_back(spec("W", {H, 2}));
      out.push_back(spec("U", {H, H}));
      out.push_back(spec("alpha", {H}));
      out.push_back(spec("beta1", {H}));
      out.push_back(spec("beta2", {H}));
      out.push_back(spec("b", {H}));
      break;
    case CellKind::gru:
      for (const char* g : {"z", "r", "n"}) add_gate(out, g, H);
      break;
    case CellKind::lstm:
      for (const char* g : {"i", "f", "o", "g"}) add_gate(out, g, H);
      break;
  }
  out.push_back(spec("readout_w", {2, H}));
  out.push_back(spec("readout_b", {2}));
  return out;
}

std::size_t parameter_count(CellKind kind, std::size_t hidden_size) {
  std::size_t n = 0;
  for (const auto& t : parameter_layout(kind, hidden_size)) n += t.values.size();
  return n;
}

std::size_t hidden_size_for_budget(CellKind kind, std::size_t target) {
  std::size_t best = 1;
  auto gap = [&](std::size_t h) {
    const auto c = static_cast<long long>(parameter_count(kind, h));
    return std::llabs(c - static_cast<long long>(target));
  };
  for (std::size_t h = 2; h <= kMaxHidden; ++h) {
    if (gap(h) < gap(best)) best = h;
  }
  return best;
}

RnnModel::RnnModel(CellKind kind, std::size_t hidden_size, std::uint64_t seed,
                   std::vector<Tensor> parameters, CellState initial)
    : kind_(kind),
      hidden_(hidden_size),
      seed_(seed),
      parameters_(std::move(parameters)),
      initial_(std::move(initial)) {
  if (hidden_ == 0 || hidden_ > kMaxHidden) {
    throw InputError("hidden size must be in 1.." + std::to_string(kMaxHidden));
  }
  const auto layout = parameter_layout(kind_, hidden_);
  if (layout.size() != parameters_.size()) throw InputError("parameter list does not match the cell kind");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].name != parameters_[i].name || layout[i].shape != parameters_[i].shape ||
        layout[i].values.size() != parameters_[i].values.size()) {
      throw InputError("parameter '" + parameters_[i].name + "' has an unexpected name or shape");
    }
  }
  const auto H = static_cast<Eigen::Index>(hidden_);
  if (initial_.h.size() != H) throw InputError("initial hidden state has the wrong size");
  if (kind_ == CellKind::lstm ? initial_.c.size() != H : initial_.c.size() != 0) {
    throw InputError("initial cell state has the wrong size");
  }
}

std::size_t RnnModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : parameters_) n += t.values.size();
  return n;
}

CellState RnnModel::step(const CellState& state, int symbol) const {
  CellState next;
  detail::step_forward(kind_, parameters_, hidden_, state, symbol, next, nullptr);
  return next;
}

Eigen::Vector2d RnnModel::scores(const CellState& state) const {
  const std::size_t r = detail::readout_index(kind_);
  const auto& w = parameters_[r];
  const auto& b = parameters_[r + 1];
  const Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> V(w.values.data(), 2,
                                                                      static_cast<Eigen::Index>(hidden_));
  Eigen::Vector2d logits = V * state.h + Eigen::Vector2d(b.values[0], b.values[1]);
  logits.array() -= logits.maxCoeff();
  const Eigen::Vector2d e = logits.array().exp();
  return e / e.sum();
}

Label RnnModel::decide(const CellState& state) const {
  const Eigen::Vector2d s = scores(state);
  return s[1] > s[0] ? Label::positive : Label::negative;
}

HiddenTrace RnnModel::forward(std::string_view x) const {
  HiddenTrace trace;
  trace.input = std::string(x);
  trace.states.reserve(x.size() + 1);
  CellState state = initial_;
  trace.states.push_back(state.h);
  trace.prefix_predictions.push_back(decide(state));
  for (char c : x) {
    state = step(state, symbol_index(c));
    trace.states.push_back(state.h);
    trace.prefix_predictions.push_back(decide(state));
  }
  trace.scores = scores(state);
  trace.prediction = trace.prefix_predictions.back();
  return trace;
}

Label RnnModel::classify(std::string_view x) const {
  CellState state = initial_;
  for (char c : x) state = step(state, symbol_index(c));
  return decide(state);
}

Gradients RnnModel::zero_gradients() const {
  Gradients g;
  g.reserve(parameters_.size());
  for (const auto& t : parameters_) g.emplace_back(t.values.size(), 0.0);
  return g;
}

double RnnModel::accumulate_gradient(std::string_view x, Label target, Gradients& grads) const {
  const auto H = static_cast<Eigen::Index>(hidden_);
  std::vector<detail::StepCache> caches(x.size());
  CellState state = initial_;
  for (std::size_t t = 0; t < x.size(); ++t) {
    CellState next;
    detail::step_forward(kind_, parameters_, hidden_, state, symbol_index(x[t]), next, &caches[t]);
    state = std::move(next);
  }

  const Eigen::Vector2d p = scores(state);
  const std::size_t y = index_of(target);
  const double loss = -std::log(std::max(p[static_cast<Eigen::Index>(y)], 1e-300));
  Eigen::Vector2d dlogits = p;
  dlogits[static_cast<Eigen::Index>(y)] -= 1.0;

  const std::size_t r = detail::readout_index(kind_);
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>> dV(grads[r].data(), 2, H);
  dV.noalias() += dlogits * state.h.transpose();
  grads[r + 1][0] += dlogits[0];
  grads[r + 1][1] += dlogits[1];
  const Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> V(parameters_[r].values.data(), 2, H);

  StateVector dh = V.transpose() * dlogits;
  StateVector dc;
  if (kind_ == CellKind::lstm) dc = StateVector::Zero(H);
  for (std::size_t t = x.size(); t-- > 0;) {
    StateVector dh_prev, dc_prev;
    detail::step_backward(kind_, parameters_, hidden_, caches[t], dh, dc, grads, dh_prev, dc_prev);
    dh = std::move(dh_prev);
    dc = std::move(dc_prev);
  }
  return loss;
}

double default_weight_range(CellKind kind) noexcept {
  switch (kind) {
    case CellKind::second_order: return 4.0;
    case CellKind::gru: return 1.0;
    case CellKind::lstm: return 2.0;
    case CellKind::elman:
    case CellKind::mi_rnn: return 0.5;
  }
  return 0.5;
}

RnnModel init_model(CellKind kind, std::size_t hidden_size, std::uint64_t seed,
                    double weight_range) {
  if (hidden_size == 0 || hidden_size > kMaxHidden) {
    throw InputError("hidden size must be in 1.." + std::to_string(kMaxHidden));
  }
  if (!(weight_range > 0.0)) throw InputError("weight range must be positive");
  Rng rng(seed);
  auto params = parameter_layout(kind, hidden_size);
  for (auto& t : params) {
    const bool gain = kind == CellKind::mi_rnn &&
                      (t.name == "alpha" || t.name == "beta1" || t.name == "beta2");
    const double fan_in = t.shape.size() >= 2 ? static_cast<double>(t.shape[1]) : 1.0;
    const double scale = 1.0 / std::sqrt(fan_in);
    for (double& v : t.values) v = gain ? rng.uniform(0.5, 1.5) : rng.uniform(-weight_range, weight_range) * scale;
  }
  const auto H = static_cast<Eigen::Index>(hidden_size);
  CellState initial;
  initial.h.resize(H);
  for (Eigen::Index i = 0; i < H; ++i) initial.h[i] = rng.uniform();
  if (kind == CellKind::lstm) {
    initial.c.resize(H);
    for (Eigen::Index i = 0; i < H; ++i) initial.c[i] = rng.uniform();
  }
  return RnnModel(kind, hidden_size, seed, std::move(params), std::move(initial));
}

std::vector<HiddenTrace> record_traces(const RnnModel& model, std::span<const std::string> inputs) {
  std::vector<HiddenTrace> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(model.forward(x));
  return out;
}

}  // namespace tomita
