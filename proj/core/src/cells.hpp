#pragma once

#include <span>

#include "tomita/model.hpp"

namespace tomita::detail {

/// Intermediate values of one recurrent step kept for the backward pass.
struct StepCache {
  int symbol = 0;
  StateVector h_prev, c_prev;
  StateVector h, c;
  std::array<StateVector, 4> gates;
};

void step_forward(CellKind kind, std::span<const Tensor> params, std::size_t hidden,
                  const CellState& prev, int symbol, CellState& next, StepCache* cache);

/// Given dL/dh and dL/dc of the step output, accumulates parameter
/// gradients and writes dL/dh_prev, dL/dc_prev.
void step_backward(CellKind kind, std::span<const Tensor> params, std::size_t hidden,
                   const StepCache& cache, const StateVector& dh, const StateVector& dc,
                   Gradients& grads, StateVector& dh_prev, StateVector& dc_prev);

/// Index of the first readout tensor in the parameter list.
std::size_t readout_index(CellKind kind) noexcept;

}  // namespace tomita::detail
