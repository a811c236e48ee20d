#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately re-derive results from first principles (full sorts, O(N^2 m)
// scans, finite differences in double precision) instead of reusing library
// code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/params.hpp"
#include "rffs/tape.hpp"
#include "rffs/tensor.hpp"

namespace testutil {

inline std::vector<rffs::Vec3> random_cloud(int n, rffs::Rng& rng, float extent = 10.f) {
  std::vector<rffs::Vec3> pts(static_cast<size_t>(n));
  for (auto& p : pts) {
    p.x = rng.uniformf(0.f, extent);
    p.y = rng.uniformf(0.f, extent);
    p.z = rng.uniformf(0.f, extent);
  }
  return pts;
}

/// All data indices sorted by (squared distance to q, index) — the ground
/// truth ordering every neighbor search must agree with.
inline std::vector<int32_t> full_sorted_order(const std::vector<rffs::Vec3>& pts,
                                              const rffs::Vec3& q) {
  std::vector<int32_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    const float da = rffs::sq_dist(pts[static_cast<size_t>(a)], q);
    const float db = rffs::sq_dist(pts[static_cast<size_t>(b)], q);
    return da < db || (da == db && a < b);
  });
  return order;
}

/// Brute-force k nearest neighbors (independent of the kd-tree path).
inline std::vector<int32_t> brute_knn(const std::vector<rffs::Vec3>& pts, const rffs::Vec3& q,
                                      int k) {
  auto order = full_sorted_order(pts, q);
  return std::vector<int32_t>(order.begin(), order.begin() + k);
}

/// Literal O(N^2 m) farthest point sampling: every step recomputes all
/// point-to-set distances from scratch.
inline std::vector<int32_t> brute_fps(const std::vector<rffs::Vec3>& pts, int m, int32_t start) {
  std::vector<int32_t> picked{start};
  while (static_cast<int>(picked.size()) < m) {
    int32_t best = -1;
    float best_d2 = -1.f;
    for (int32_t i = 0; i < static_cast<int32_t>(pts.size()); ++i) {
      if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
      float d2 = std::numeric_limits<float>::infinity();
      for (int32_t p : picked)
        d2 = std::min(d2, rffs::sq_dist(pts[static_cast<size_t>(i)], pts[static_cast<size_t>(p)]));
      if (d2 > best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    picked.push_back(best);
  }
  return picked;
}

/// Sorted-rank skip/take oracle for the sparse selection: walk the fully
/// sorted neighbor list in groups of (r-1+delta), skip r-1 and keep delta per
/// complete group, then keep the last k mod delta ranks of the expansion
/// region.
inline std::vector<int32_t> skip_take_oracle(const std::vector<int32_t>& sorted, int k, int delta,
                                             int r) {
  const int group = r - 1 + delta;
  const int q = k / delta;
  const int f = k % delta;
  const int partial = (f * group + delta - 1) / delta;  // ceil(f*group/delta)
  const int ks = q * group + partial;
  std::vector<int32_t> out;
  for (int g = 0; g < q; ++g)
    for (int j = 0; j < delta; ++j)
      out.push_back(sorted[static_cast<size_t>(g * group + (r - 1) + j)]);
  for (int j = f; j > 0; --j) out.push_back(sorted[static_cast<size_t>(ks - j)]);
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient checking (double-precision forward)
// ---------------------------------------------------------------------------

/// Builds the scalar loss on the given tape and reports the tape vars of
/// every store entry (aligned with entry order) through `param_vars`.
using BuildLoss =
    std::function<rffs::Var(rffs::TapeT<double>&, std::vector<rffs::Var>& param_vars)>;

struct GradCheck {
  double max_rel_err = 0.0;
  std::string worst;  // "entry[flat_index]"
};

/// Wraps the common case: push the whole store yourself and hand the builder
/// the ParamVars.
inline BuildLoss with_store(rffs::ParamStoreT<double>& store,
                            std::function<rffs::Var(rffs::TapeT<double>&,
                                                    const rffs::ParamVarsT<double>&)> fn) {
  return [&store, fn](rffs::TapeT<double>& t, std::vector<rffs::Var>& param_vars) {
    auto pv = rffs::ParamVarsT<double>::push_all(t, store, /*requires_grad=*/true);
    param_vars = pv.vars;
    return fn(t, pv);
  };
}

/// Central differences (step h) on every element of every store entry
/// against the tape's analytic gradients. Relative error is
/// |a - n| / max(1, |a|, |n|).
inline GradCheck gradcheck(rffs::ParamStoreT<double>& store, const BuildLoss& build,
                           double h = 1e-3) {
  rffs::TapeT<double> tape;
  std::vector<rffs::Var> pv;
  rffs::Var loss = build(tape, pv);
  tape.backward(loss);
  std::vector<rffs::TensorT<double>> analytic;
  for (int i = 0; i < store.count(); ++i) analytic.push_back(tape.grad(pv[static_cast<size_t>(i)]));

  auto eval = [&]() {
    rffs::TapeT<double> t2;
    std::vector<rffs::Var> dummy;
    return t2.val(build(t2, dummy)).data[0];
  };

  GradCheck res;
  for (int e = 0; e < store.count(); ++e) {
    auto& tensor = store.entry(e).value;
    for (int64_t i = 0; i < tensor.numel(); ++i) {
      const double keep = tensor.data[static_cast<size_t>(i)];
      tensor.data[static_cast<size_t>(i)] = keep + h;
      const double up = eval();
      tensor.data[static_cast<size_t>(i)] = keep - h;
      const double down = eval();
      tensor.data[static_cast<size_t>(i)] = keep;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic[static_cast<size_t>(e)].data[static_cast<size_t>(i)];
      const double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst = store.entry(e).name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return res;
}

/// Loss head for layer checks: weighted sum of the output against a fixed
/// random projection, so every output element receives a distinct gradient.
inline rffs::Var projected_loss(rffs::TapeT<double>& t, rffs::Var out, uint64_t seed) {
  const auto& v = t.val(out);
  rffs::TensorT<double> proj(v.shape);
  rffs::Rng rng(seed, 0x50524f4aULL);
  for (auto& x : proj.data) x = rng.uniform(-1.0, 1.0);
  rffs::Var p = t.leaf(std::move(proj), false);
  return rffs::ops::sum_all(t, rffs::ops::mul(t, out, p));
}

inline rffs::TensorT<double> random_tensor(std::vector<int> shape, rffs::Rng& rng,
                                           double lo = -1.0, double hi = 1.0) {
  rffs::TensorT<double> t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

/// Zero-initialized biases can pin pre-activations exactly onto the ReLU
/// kink (a centroid's self-edge has zero relative position), where finite
/// differences are undefined. Gradient checks perturb them to a random
/// differentiable point first.
inline void randomize_biases(rffs::ParamStoreT<double>& store, uint64_t seed) {
  rffs::Rng rng(seed, 0x42494153ULL);
  for (auto& e : store.entries())
    if (e.name.size() > 5 && e.name.rfind(".bias") == e.name.size() - 5)
      for (auto& v : e.value.data) v = rng.uniform(-0.2, 0.2);
}

}  // namespace testutil
