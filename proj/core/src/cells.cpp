#include "cells.hpp"

#include <cmath>

namespace tomita::detail {
namespace {

using ConstMat = Eigen::Map<const Eigen::MatrixXd>;
using MutMat = Eigen::Map<Eigen::MatrixXd>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using MutVec = Eigen::Map<Eigen::VectorXd>;

ConstMat mat(const Tensor& t) {
  return {t.values.data(), static_cast<Eigen::Index>(t.shape[0]),
          static_cast<Eigen::Index>(t.shape.size() > 1 ? t.shape[1] : 1)};
}

ConstMat slice(const Tensor& t, int k) {
  const auto rows = static_cast<Eigen::Index>(t.shape[0]);
  const auto cols = static_cast<Eigen::Index>(t.shape[1]);
  return {t.values.data() + k * rows * cols, rows, cols};
}

ConstVec vec(const Tensor& t) {
  return {t.values.data(), static_cast<Eigen::Index>(t.values.size())};
}

MutMat gmat(Gradients& g, std::span<const Tensor> p, std::size_t i) {
  return {g[i].data(), static_cast<Eigen::Index>(p[i].shape[0]),
          static_cast<Eigen::Index>(p[i].shape.size() > 1 ? p[i].shape[1] : 1)};
}

MutMat gslice(Gradients& g, std::span<const Tensor> p, std::size_t i, int k) {
  const auto rows = static_cast<Eigen::Index>(p[i].shape[0]);
  const auto cols = static_cast<Eigen::Index>(p[i].shape[1]);
  return {g[i].data() + k * rows * cols, rows, cols};
}

MutVec gvec(Gradients& g, std::size_t i) {
  return {g[i].data(), static_cast<Eigen::Index>(g[i].size())};
}

template <class V>
StateVector sigmoid(const V& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

template <class V>
StateVector tanh_of(const V& x) {
  return x.array().tanh().matrix();
}

// Gate block g of a gated cell: W at 3g, U at 3g+1, b at 3g+2.
StateVector gate_pre(std::span<const Tensor> p, std::size_t g, int symbol, const StateVector& h) {
  StateVector pre = mat(p[3 * g]).col(symbol) + vec(p[3 * g + 2]);
  pre.noalias() += mat(p[3 * g + 1]) * h;
  return pre;
}

void gate_backward(std::span<const Tensor> p, std::size_t g, int symbol, const StateVector& dpre,
                   const StateVector& h_in, Gradients& grads, StateVector& dh_in) {
  gmat(grads, p, 3 * g).col(symbol) += dpre;
  gmat(grads, p, 3 * g + 1).noalias() += dpre * h_in.transpose();
  gvec(grads, 3 * g + 2) += dpre;
  dh_in.noalias() += mat(p[3 * g + 1]).transpose() * dpre;
}

}  // namespace

std::size_t readout_index(CellKind kind) noexcept {
  switch (kind) {
    case CellKind::elman: return 3;
    case CellKind::second_order: return 2;
    case CellKind::mi_rnn: return 6;
    case CellKind::gru: return 9;
    case CellKind::lstm: return 12;
  }
  return 0;
}

void step_forward(CellKind kind, std::span<const Tensor> p, std::size_t hidden,
                  const CellState& prev, int symbol, CellState& next, StepCache* cache) {
  const auto H = static_cast<Eigen::Index>(hidden);
  const StateVector& h = prev.h;
  switch (kind) {
    case CellKind::elman: {
      StateVector pre = mat(p[0]).col(symbol) + vec(p[2]);
      pre.noalias() += mat(p[1]) * h;
      next.h = tanh_of(pre);
      break;
    }
    case CellKind::second_order: {
      StateVector pre = vec(p[1]);
      pre.noalias() += slice(p[0], symbol) * h;
      next.h = sigmoid(pre);
      break;
    }
    case CellKind::mi_rnn: {
      StateVector wx = mat(p[0]).col(symbol);
      StateVector uh(H);
      uh.noalias() = mat(p[1]) * h;
      const StateVector pre = (vec(p[2]).array() * wx.array() * uh.array() +
                               vec(p[3]).array() * uh.array() + vec(p[4]).array() * wx.array() +
                               vec(p[5]).array())
                                  .matrix();
      next.h = tanh_of(pre);
      if (cache) {
        cache->gates[0] = wx;
        cache->gates[1] = uh;
      }
      break;
    }
    case CellKind::gru: {
      const StateVector z = sigmoid(gate_pre(p, 0, symbol, h));
      const StateVector r = sigmoid(gate_pre(p, 1, symbol, h));
      const StateVector rh = (r.array() * h.array()).matrix();
      const StateVector n = tanh_of(gate_pre(p, 2, symbol, rh));
      next.h = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
      if (cache) {
        cache->gates[0] = z;
        cache->gates[1] = r;
        cache->gates[2] = n;
        cache->gates[3] = rh;
      }
      break;
    }
    case CellKind::lstm: {
      const StateVector i = sigmoid(gate_pre(p, 0, symbol, h));
      const StateVector f = sigmoid(gate_pre(p, 1, symbol, h));
      const StateVector o = sigmoid(gate_pre(p, 2, symbol, h));
      const StateVector g = tanh_of(gate_pre(p, 3, symbol, h));
      next.c = (f.array() * prev.c.array() + i.array() * g.array()).matrix();
      next.h = (o.array() * next.c.array().tanh()).matrix();
      if (cache) {
        cache->gates[0] = i;
        cache->gates[1] = f;
        cache->gates[2] = o;
        cache->gates[3] = g;
      }
      break;
    }
  }
  if (cache) {
    cache->symbol = symbol;
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->h = next.h;
    cache->c = next.c;
  }
}

void step_backward(CellKind kind, std::span<const Tensor> p, std::size_t hidden,
                   const StepCache& cache, const StateVector& dh, const StateVector& dc,
                   Gradients& grads, StateVector& dh_prev, StateVector& dc_prev) {
  const auto H = static_cast<Eigen::Index>(hidden);
  const int sym = cache.symbol;
  const StateVector& h_prev = cache.h_prev;
  dh_prev = StateVector::Zero(H);
  dc_prev.resize(0);
  switch (kind) {
    case CellKind::elman: {
      const StateVector dpre = (dh.array() * (1.0 - cache.h.array().square())).matrix();
      gmat(grads, p, 0).col(sym) += dpre;
      gmat(grads, p, 1).noalias() += dpre * h_prev.transpose();
      gvec(grads, 2) += dpre;
      dh_prev.noalias() += mat(p[1]).transpose() * dpre;
      break;
    }
    case CellKind::second_order: {
      const StateVector dpre = (dh.array() * cache.h.array() * (1.0 - cache.h.array())).matrix();
      gslice(grads, p, 0, sym).noalias() += dpre * h_prev.transpose();
      gvec(grads, 1) += dpre;
      dh_prev.noalias() += slice(p[0], sym).transpose() * dpre;
      break;
    }
    case CellKind::mi_rnn: {
      const auto& wx = cache.gates[0];
      const auto& uh = cache.gates[1];
      const auto alpha = vec(p[2]).array();
      const StateVector dpre = (dh.array() * (1.0 - cache.h.array().square())).matrix();
      gvec(grads, 2) += (dpre.array() * wx.array() * uh.array()).matrix();
      gvec(grads, 3) += (dpre.array() * uh.array()).matrix();
      gvec(grads, 4) += (dpre.array() * wx.array()).matrix();
      gvec(grads, 5) += dpre;
      const StateVector duh = (dpre.array() * (alpha * wx.array() + vec(p[3]).array())).matrix();
      const StateVector dwx = (dpre.array() * (alpha * uh.array() + vec(p[4]).array())).matrix();
      gmat(grads, p, 0).col(sym) += dwx;
      gmat(grads, p, 1).noalias() += duh * h_prev.transpose();
      dh_prev.noalias() += mat(p[1]).transpose() * duh;
      break;
    }
    case CellKind::gru: {
      const auto& z = cache.gates[0];
      const auto& r = cache.gates[1];
      const auto& n = cache.gates[2];
      const auto& rh = cache.gates[3];
      const StateVector dz = (dh.array() * (h_prev.array() - n.array())).matrix();
      const StateVector dn = (dh.array() * (1.0 - z.array())).matrix();
      dh_prev += (dh.array() * z.array()).matrix();

      const StateVector dpre_n = (dn.array() * (1.0 - n.array().square())).matrix();
      StateVector drh = StateVector::Zero(H);
      gate_backward(p, 2, sym, dpre_n, rh, grads, drh);
      const StateVector dr = (drh.array() * h_prev.array()).matrix();
      dh_prev += (drh.array() * r.array()).matrix();

      const StateVector dpre_z = (dz.array() * z.array() * (1.0 - z.array())).matrix();
      gate_backward(p, 0, sym, dpre_z, h_prev, grads, dh_prev);
      const StateVector dpre_r = (dr.array() * r.array() * (1.0 - r.array())).matrix();
      gate_backward(p, 1, sym, dpre_r, h_prev, grads, dh_prev);
      break;
    }
    case CellKind::lstm: {
      const auto& i = cache.gates[0];
      const auto& f = cache.gates[1];
      const auto& o = cache.gates[2];
      const auto& g = cache.gates[3];
      const StateVector tc = cache.c.array().tanh().matrix();
      const StateVector dout = (dh.array() * tc.array()).matrix();
      StateVector dcell = (dh.array() * o.array() * (1.0 - tc.array().square())).matrix();
      if (dc.size() == H) dcell += dc;
      const StateVector df = (dcell.array() * cache.c_prev.array()).matrix();
      const StateVector di = (dcell.array() * g.array()).matrix();
      const StateVector dg = (dcell.array() * i.array()).matrix();
      dc_prev = (dcell.array() * f.array()).matrix();

      gate_backward(p, 0, sym, (di.array() * i.array() * (1.0 - i.array())).matrix(), h_prev, grads, dh_prev);
      gate_backward(p, 1, sym, (df.array() * f.array() * (1.0 - f.array())).matrix(), h_prev, grads, dh_prev);
      gate_backward(p, 2, sym, (dout.array() * o.array() * (1.0 - o.array())).matrix(), h_prev, grads, dh_prev);
      gate_backward(p, 3, sym, (dg.array() * (1.0 - g.array().square())).matrix(), h_prev, grads, dh_prev);
      break;
    }
  }
}

}  // namespace tomita::detail
