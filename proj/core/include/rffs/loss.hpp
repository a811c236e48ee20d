#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/tape.hpp"

namespace rffs {

/// Per-level weights of the multi-resolution loss. Defaults follow the
/// finest-to-coarsest order {1.0, 0.3, 0.3, 0.3}.
struct LossWeights {
  std::array<float, 4> lambda{1.0f, 0.3f, 0.3f, 0.3f};

  void validate() const {
    bool any = false;
    for (float l : lambda) {
      check(l >= 0.f, "LossWeights: weights must be nonnegative");
      any = any || l > 0.f;
    }
    check(any, "LossWeights: at least one weight must be positive");
  }
};

enum class LossReduction { kMean, kSum };

namespace ops {

/// Softmax over the last axis followed by the per-point class-summed binary
/// cross entropy against one-hot labels:
///   L_point = -( log p_y + sum_{c != y} log(1 - p_c) )
/// reduced over points by mean or sum. Exactly one-hot probabilities give
/// exactly zero loss (0*log 0 terms vanish by construction).
template <class S>
Var softmax_bce(TapeT<S>& t, Var logits, const std::vector<int32_t>& labels,
                LossReduction reduction) {
  const auto& z = t.val(logits);
  check(z.ndim() == 2, "softmax_bce: logits must be [N x C], got " + z.shape_str());
  const int n = z.dim(0), c = z.dim(1);
  check(static_cast<int>(labels.size()) == n,
        "softmax_bce: label count " + std::to_string(labels.size()) +
            " does not match logit rows " + std::to_string(n));
  for (int32_t l : labels)
    check(l >= 0 && l < c, "softmax_bce: label " + std::to_string(l) + " out of range [0," +
                               std::to_string(c) + ")");
  for (S v : z.data)
    if (!std::isfinite(static_cast<double>(v)))
      throw std::runtime_error("softmax_bce: non-finite logit");

  auto probs = std::make_shared<std::vector<S>>(static_cast<size_t>(n) * c);
  const S tiny = static_cast<S>(1e-12);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const S* zr = z.data.data() + static_cast<int64_t>(i) * c;
    S* pr = probs->data() + static_cast<int64_t>(i) * c;
    S zmax = zr[0];
    for (int j = 1; j < c; ++j) zmax = std::max(zmax, zr[j]);
    S denom = S(0);
    for (int j = 0; j < c; ++j) {
      pr[j] = std::exp(zr[j] - zmax);
      denom += pr[j];
    }
    for (int j = 0; j < c; ++j) pr[j] /= denom;
    const int y = labels[static_cast<size_t>(i)];
    double point = -std::log(static_cast<double>(std::max(pr[y], tiny)));
    for (int j = 0; j < c; ++j) {
      if (j == y) continue;
      point -= std::log(static_cast<double>(std::max(S(1) - pr[j], tiny)));
    }
    total += point;
  }
  if (reduction == LossReduction::kMean) total /= n;

  auto labels_copy = std::make_shared<std::vector<int32_t>>(labels);
  return t.record(
      TensorT<S>::scalar(static_cast<S>(total)), {logits},
      [logits, probs, labels_copy, n, c, reduction](TapeT<S>& tp, Var out_v) {
        if (!tp.needs_grad(logits)) return;
        const S g0 = tp.grad_mut(out_v).data[0];
        const S g = reduction == LossReduction::kMean ? g0 / static_cast<S>(n) : g0;
        auto& dz = tp.grad_mut(logits);
        const S tiny2 = static_cast<S>(1e-12);
        for (int i = 0; i < n; ++i) {
          const S* pr = probs->data() + static_cast<int64_t>(i) * c;
          S* dr = dz.data.data() + static_cast<int64_t>(i) * c;
          const int y = labels_copy->at(static_cast<size_t>(i));
          // dL/dz_k = p_k - [k==y] + [k!=y] p_k/(1-p_k) - p_k * sum_{c!=y} p_c/(1-p_c)
          S srest = S(0);
          for (int j = 0; j < c; ++j) {
            if (j == y) continue;
            srest += pr[j] / std::max(S(1) - pr[j], tiny2);
          }
          for (int j = 0; j < c; ++j) {
            S d = pr[j] - (j == y ? S(1) : S(0)) - pr[j] * srest;
            if (j != y) d += pr[j] / std::max(S(1) - pr[j], tiny2);
            dr[j] += g * d;
          }
        }
      });
}

}  // namespace ops

/// Weighted multi-resolution loss: total plus the unweighted per-level terms
/// (read off the tape values for logging).
template <class S>
struct MrfaLossResult {
  Var total;
  std::array<Var, 4> per_level;
  std::array<double, 4> per_level_value;
};

template <class S>
MrfaLossResult<S> mrfa_loss(TapeT<S>& t, const std::array<Var, 4>& logits,
                            const std::array<const std::vector<int32_t>*, 4>& labels,
                            const LossWeights& w,
                            LossReduction reduction = LossReduction::kMean) {
  w.validate();
  MrfaLossResult<S> res;
  Var total;
  for (int l = 0; l < 4; ++l) {
    const auto& lev_labels = *labels[static_cast<size_t>(l)];
    check(t.val(logits[static_cast<size_t>(l)]).dim(0) ==
              static_cast<int>(lev_labels.size()),
          "mrfa_loss: level " + std::to_string(l) + " row count mismatch");
    Var li = ops::softmax_bce(t, logits[static_cast<size_t>(l)], lev_labels, reduction);
    res.per_level[static_cast<size_t>(l)] = li;
    res.per_level_value[static_cast<size_t>(l)] = static_cast<double>(t.val(li).data[0]);
    Var weighted = ops::scale(t, li, static_cast<S>(w.lambda[static_cast<size_t>(l)]));
    total = total.valid() ? ops::add(t, total, weighted) : weighted;
  }
  res.total = total;
  return res;
}

}  // namespace rffs
