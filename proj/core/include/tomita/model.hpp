#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/common.hpp"

namespace tomita {

enum class CellKind { elman, second_order, mi_rnn, gru, lstm };

inline constexpr std::array<CellKind, 5> kAllCells = {
    CellKind::elman, CellKind::second_order, CellKind::mi_rnn, CellKind::gru, CellKind::lstm};

std::string_view to_string(CellKind kind) noexcept;
CellKind parse_cell_kind(std::string_view text);

/// Largest supported hidden size; state vectors live on the stack.
inline constexpr std::size_t kMaxHidden = 64;

using StateVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, static_cast<int>(kMaxHidden), 1>;

/// Named dense parameter block. Values are stored first-index-fastest
/// (column-major); a rank-3 tensor of shape {H, H, 2} is two contiguous
/// H×H column-major slices.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Recurrent state; `c` is only used by the LSTM cell and is empty otherwise.
struct CellState {
  StateVector h;
  StateVector c;

  friend bool operator==(const CellState& a, const CellState& b) {
    return a.h.size() == b.h.size() && a.c.size() == b.c.size() && a.h == b.h && a.c == b.c;
  }
};

/// Hidden vectors h_0..h_T of one forward pass plus the final decision.
struct HiddenTrace {
  std::string input;
  std::vector<StateVector> states;
  Eigen::Vector2d scores;
  Label prediction = Label::negative;
  /// Decision the readout gives for every prefix, aligned with `states`.
  std::vector<Label> prefix_predictions;
};

/// Per-parameter gradient buffers, laid out like RnnModel::parameters().
using Gradients = std::vector<std::vector<double>>;

/// A recurrent binary classifier over {0,1}: one of five cells, one-hot
/// inputs, an affine readout on the final hidden state and a softmax.
///
///   elman         h' = tanh(W x + U h + b)
///   second_order  h' = sigmoid(T[:,:,x] h + b)
///   mi_rnn        h' = tanh(alpha*(W x)*(U h) + beta1*(U h) + beta2*(W x) + b)
///   gru, lstm     standard gated forms
class RnnModel {
 public:
  using State = CellState;

  RnnModel(CellKind kind, std::size_t hidden_size, std::uint64_t seed,
           std::vector<Tensor> parameters, CellState initial);

  CellKind kind() const noexcept { return kind_; }
  std::size_t hidden_size() const noexcept { return hidden_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const Tensor> parameters() const noexcept { return parameters_; }
  std::span<Tensor> mutable_parameters() noexcept { return parameters_; }
  std::size_t parameter_count() const noexcept;

  const CellState& initial_state() const noexcept { return initial_; }
  CellState step(const CellState& state, int symbol) const;
  /// Softmax-normalized (negative, positive) scores for a state.
  Eigen::Vector2d scores(const CellState& state) const;
  /// argmax of the scores; ties go to negative.
  Label decide(const CellState& state) const;

  HiddenTrace forward(std::string_view x) const;
  Label classify(std::string_view x) const;

  /// Cross-entropy of the final-step scores against `target`; adds the
  /// backpropagation-through-time gradient into `grads`.
  double accumulate_gradient(std::string_view x, Label target, Gradients& grads) const;
  Gradients zero_gradients() const;

  friend bool operator==(const RnnModel&, const RnnModel&) = default;

 private:
  CellKind kind_;
  std::size_t hidden_;
  std::uint64_t seed_;
  std::vector<Tensor> parameters_;
  CellState initial_;
};

/// Name and shape of every parameter tensor for a cell, readout last.
std::vector<Tensor> parameter_layout(CellKind kind, std::size_t hidden_size);
std::size_t parameter_count(CellKind kind, std::size_t hidden_size);

/// Hidden size whose parameter count is closest to `target` (ties to the
/// smaller size), so different cells can be compared at equal capacity.
std::size_t hidden_size_for_budget(CellKind kind, std::size_t target);

/// Half-width of the uniform weight distribution before 1/sqrt(fan-in)
/// scaling. Sigmoid second-order cells need wide weights to escape the
/// contractive regime; tanh cells train best near 0.5.
double default_weight_range(CellKind kind) noexcept;

/// Weights uniform in [-range, range] / sqrt(fan-in); multiplicative gains
/// of the MI cell uniform in [0.5, 1.5]; initial activations uniform in
/// [0, 1). Deterministic in `seed`.
RnnModel init_model(CellKind kind, std::size_t hidden_size, std::uint64_t seed,
                    double weight_range);
inline RnnModel init_model(CellKind kind, std::size_t hidden_size, std::uint64_t seed) {
  return init_model(kind, hidden_size, seed, default_weight_range(kind));
}

std::vector<HiddenTrace> record_traces(const RnnModel& model, std::span<const std::string> inputs);

}  // namespace tomita
