#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/params.hpp"
#include "rffs/tensor.hpp"

namespace rffs {

/// Adam with decoupled weight decay. Defaults: lr 0.002, weight decay 0.01,
/// beta1 0.9, beta2 0.999, eps 1e-8.
struct AdamConfig {
  float lr = 0.002f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.01f;
};

template <class S>
struct AdamStateT {
  AdamConfig cfg;
  int64_t step = 0;
  std::vector<TensorT<S>> m;
  std::vector<TensorT<S>> v;

  static AdamStateT init(const ParamStoreT<S>& params, AdamConfig cfg) {
    AdamStateT st;
    st.cfg = cfg;
    st.m.reserve(static_cast<size_t>(params.count()));
    st.v.reserve(static_cast<size_t>(params.count()));
    for (int i = 0; i < params.count(); ++i) {
      st.m.push_back(TensorT<S>::zeros(params.entry(i).value.shape));
      st.v.push_back(TensorT<S>::zeros(params.entry(i).value.shape));
    }
    return st;
  }
};

using AdamState = AdamStateT<float>;

/// One optimizer step. `grads` is aligned with the store's entry order.
/// Non-finite gradients abort with the offending parameter's name.
template <class S>
void adam_step(ParamStoreT<S>& params, const std::vector<TensorT<S>>& grads,
               AdamStateT<S>& state) {
  check(static_cast<int>(grads.size()) == params.count(),
        "adam_step: gradient count does not match parameter count");
  check(static_cast<int>(state.m.size()) == params.count(),
        "adam_step: optimizer state does not match parameter count");
  state.step += 1;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (int i = 0; i < params.count(); ++i) {
    auto& e = params.entry(i);
    const auto& g = grads[static_cast<size_t>(i)];
    check(g.same_shape(e.value), "adam_step: gradient shape mismatch for " + e.name);
    auto& m = state.m[static_cast<size_t>(i)];
    auto& v = state.v[static_cast<size_t>(i)];
    for (int64_t j = 0; j < e.value.numel(); ++j) {
      const size_t k = static_cast<size_t>(j);
      const S gj = g.data[k];
      if (!std::isfinite(static_cast<double>(gj)))
        throw std::runtime_error("adam_step: non-finite gradient in parameter " + e.name);
      m.data[k] = static_cast<S>(b1 * m.data[k] + (1.0 - b1) * gj);
      v.data[k] = static_cast<S>(b2 * v.data[k] + (1.0 - b2) * static_cast<double>(gj) * gj);
      const double mhat = m.data[k] / bc1;
      const double vhat = v.data[k] / bc2;
      const double update = mhat / (std::sqrt(vhat) + state.cfg.eps) +
                            static_cast<double>(state.cfg.weight_decay) * e.value.data[k];
      e.value.data[k] = static_cast<S>(e.value.data[k] - state.cfg.lr * update);
    }
  }
}

}  // namespace rffs
