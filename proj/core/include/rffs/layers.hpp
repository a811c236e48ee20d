#pragma once

#include <array>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/hierarchy.hpp"
#include "rffs/knn.hpp"
#include "rffs/neighborhood.hpp"
#include "rffs/params.hpp"
#include "rffs/tape.hpp"

namespace rffs {

namespace detail {

/// [N x K] index matrix whose row i repeats i — the center side of each edge.
inline IndexMatrix center_index(int n, int k) {
  IndexMatrix m;
  m.rows = n;
  m.cols = k;
  m.v.resize(static_cast<size_t>(n) * k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) m.v[static_cast<size_t>(i) * k + j] = i;
  return m;
}

template <class S>
TensorT<S> to_scalar_type(const TensorT<float>& t) {
  TensorT<S> out;
  out.shape = t.shape;
  out.data.assign(t.data.begin(), t.data.end());
  return out;
}

template <>
inline TensorT<float> to_scalar_type<float>(const TensorT<float>& t) { return t; }

}  // namespace detail

/// Shared edge convolution: per edge (i, j) the feature is
/// concat(x_i, x_j - x_i), mapped by a shared linear+ReLU and max-pooled
/// over the neighbor axis. Output is invariant to neighbor-list permutation.
template <class S>
Var edge_conv(TapeT<S>& t, Var features, const Neighborhood& graph, const ParamVarsT<S>& pv,
              const LinearParams& lp) {
  const auto& x = t.val(features);
  check(x.ndim() == 2, "edge_conv: features must be [N x C], got " + x.shape_str());
  check(graph.center_count() == x.dim(0),
        "edge_conv: graph centers " + std::to_string(graph.center_count()) +
            " do not match feature rows " + std::to_string(x.dim(0)));
  check(lp.in_channels == 2 * x.dim(1),
        "edge_conv: layer expects " + std::to_string(lp.in_channels) + " edge channels, got " +
            std::to_string(2 * x.dim(1)));
  Var e = ops::edge_features(t, features, graph.idx);
  Var h = linear_relu(t, e, pv, lp);
  return ops::max_neighbors(t, h);
}

/// Dilated graph convolution over a Sparse-KNN neighborhood.
template <class S>
Var dgconv_forward(TapeT<S>& t, Var features, const Neighborhood& graph,
                   const ParamVarsT<S>& pv, const LinearParams& lp) {
  check(graph.mode == Neighborhood::Mode::kDilated, "dgconv_forward: graph mode must be dilated");
  return edge_conv(t, features, graph, pv, lp);
}

/// Annular dilated convolution: the same aggregation over an annular ring.
template <class S>
Var adconv_forward(TapeT<S>& t, Var features, const Neighborhood& graph,
                   const ParamVarsT<S>& pv, const LinearParams& lp) {
  check(graph.mode == Neighborhood::Mode::kAnnular, "adconv_forward: graph mode must be annular");
  return edge_conv(t, features, graph, pv, lp);
}

// ---------------------------------------------------------------------------
// DAGFusion
// ---------------------------------------------------------------------------

/// Cascade layout of the fusion module (built by the model to match the
/// configured rates, dense toggle and aggregation).
struct DagFusionParams {
  std::vector<LinearParams> dg;  // one per dilation rate, cascade order
  std::vector<LinearParams> ad;  // one per ring, cascade order
  LinearParams reduce_dg;        // M1
  LinearParams reduce_ad;        // M2
  LinearParams fuse;             // M
};

enum class BranchAggregation { kConcat, kAdd };

namespace detail {

template <class S>
Var combine(TapeT<S>& t, const std::vector<Var>& xs, BranchAggregation agg) {
  if (agg == BranchAggregation::kConcat) return ops::concat(t, xs);
  Var acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = ops::add(t, acc, xs[i]);
  return acc;
}

/// One cascade (Eq. 5 or Eq. 6): layer m consumes the combination of the
/// branch input and all previous outputs when dense, the previous output
/// otherwise; the collected branch feature combines every output (plus the
/// input under concat aggregation, whose channel count differs).
template <class S>
Var cascade(TapeT<S>& t, Var input, const std::vector<Neighborhood>& graphs,
            const std::vector<LinearParams>& layers, const LinearParams& reduce, bool dense,
            BranchAggregation agg, const ParamVarsT<S>& pv, bool annular) {
  const size_t m_count = layers.size();
  std::vector<Var> outs;
  Var cur = input;
  for (size_t m = 0; m < m_count; ++m) {
    Var h = annular ? adconv_forward(t, cur, graphs[m], pv, layers[m])
                    : dgconv_forward(t, cur, graphs[m], pv, layers[m]);
    outs.push_back(h);
    if (m + 1 < m_count) {
      if (dense) {
        std::vector<Var> ins;
        if (agg == BranchAggregation::kConcat) ins.push_back(input);
        ins.insert(ins.end(), outs.begin(), outs.end());
        cur = combine(t, ins, agg);
      } else {
        cur = h;
      }
    }
  }
  std::vector<Var> collected;
  if (agg == BranchAggregation::kConcat) collected.push_back(input);
  collected.insert(collected.end(), outs.begin(), outs.end());
  return linear_relu(t, combine(t, collected, agg), pv, reduce);
}

}  // namespace detail

/// Dense fusion of the DGConv and ADConv cascades: both branches are reduced
/// by their MLPs and the concatenation is fused to the output width.
template <class S>
Var dagfusion_forward(TapeT<S>& t, Var features, const std::vector<Neighborhood>& dilated,
                      const std::vector<Neighborhood>& annular, const DagFusionParams& p,
                      bool dense, BranchAggregation agg, const ParamVarsT<S>& pv) {
  check(!p.dg.empty(), "dagfusion_forward: empty cascade");
  check(dilated.size() == p.dg.size(),
        "dagfusion_forward: need one dilated graph per configured rate (got " +
            std::to_string(dilated.size()) + ", want " + std::to_string(p.dg.size()) + ")");
  check(annular.size() == p.ad.size(),
        "dagfusion_forward: need one annular graph per configured rate (got " +
            std::to_string(annular.size()) + ", want " + std::to_string(p.ad.size()) + ")");
  Var f_dg = detail::cascade(t, features, dilated, p.dg, p.reduce_dg, dense, agg, pv, false);
  Var f_ad = detail::cascade(t, features, annular, p.ad, p.reduce_ad, dense, agg, pv, true);
  return linear_relu(t, ops::concat(t, {f_dg, f_ad}), pv, p.fuse);
}

// ---------------------------------------------------------------------------
// Encoder pooling (the downsampling feature extractor slot)
// ---------------------------------------------------------------------------

/// Relative positions of each mapped finer-level neighbor around its
/// centroid, [M x K x 3]; constant per hierarchy.
inline TensorT<float> mapping_relpos(const HierarchyLevels& h, int level) {
  check(level >= 1 && level <= 3, "mapping_relpos: level out of range");
  const auto& cur = h.level(level);
  const auto& prev = h.level(level - 1);
  check(!cur.mapping.idx.empty(), "mapping_relpos: mapping graph missing");
  const int m = cur.size(), k = cur.mapping.k();
  TensorT<float> rel({m, k, 3});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const Vec3 d = prev.xyz[static_cast<size_t>(cur.mapping.idx.at(i, j))] -
                     cur.xyz[static_cast<size_t>(i)];
      float* dst = rel.data.data() + (static_cast<int64_t>(i) * k + j) * 3;
      dst[0] = d.x;
      dst[1] = d.y;
      dst[2] = d.z;
    }
  return rel;
}

/// Downsampling extractor: for every FPS centroid, gather its mapped
/// finer-level neighbors, build concat(relative position, neighbor feature)
/// per edge, apply a shared linear+ReLU and max-pool. Depends on coordinates
/// only through relative positions (translation invariant).
template <class S>
Var encoder_extract(TapeT<S>& t, Var finer_features, const HierarchyLevels& h, int level,
                    const TensorT<float>& relpos, const ParamVarsT<S>& pv,
                    const LinearParams& lp) {
  check(level >= 1 && level <= 3, "encoder_extract: level out of range");
  const auto& mapping = h.level(level).mapping;
  const auto& x = t.val(finer_features);
  check(x.dim(0) == h.level(level - 1).size(),
        "encoder_extract: feature rows do not match finer level size");
  check(lp.in_channels == 3 + x.dim(1), "encoder_extract: layer expects " +
                                            std::to_string(lp.in_channels) +
                                            " edge channels, got " +
                                            std::to_string(3 + x.dim(1)));
  Var rel = t.leaf(detail::to_scalar_type<S>(relpos), false);
  Var nb = ops::gather_rows(t, finer_features, mapping.idx);
  Var e = ops::concat(t, {rel, nb});
  Var hmap = linear_relu(t, e, pv, lp);
  return ops::max_neighbors(t, hmap);
}

// ---------------------------------------------------------------------------
// Upsampling
// ---------------------------------------------------------------------------

/// Inverse-distance interpolation plan from a coarse to a fine point set:
/// up to 3 nearest coarse points, weights 1/(d + 1e-8) normalized to sum 1.
/// A fine point coinciding with a coarse point copies it exactly.
struct InterpPlan {
  IndexMatrix idx;        // [F x k]
  std::vector<float> w;   // [F x k]
};

inline InterpPlan make_interp_plan(const std::vector<Vec3>& coarse,
                                   const std::vector<Vec3>& fine) {
  check(!coarse.empty(), "upsample_interpolate: empty coarse set");
  const int k = std::min<int>(3, static_cast<int>(coarse.size()));
  KdTree tree(coarse);
  InterpPlan plan;
  plan.idx = knn_search(tree, fine, k);
  plan.w.resize(static_cast<size_t>(plan.idx.rows) * k);
  for (int i = 0; i < plan.idx.rows; ++i) {
    float* wr = plan.w.data() + static_cast<int64_t>(i) * k;
    double sum = 0;
    bool exact = false;
    for (int j = 0; j < k; ++j) {
      const float d2 =
          sq_dist(coarse[static_cast<size_t>(plan.idx.at(i, j))], fine[static_cast<size_t>(i)]);
      if (d2 == 0.f && !exact) {
        // exact copy of the coincident coarse point
        for (int jj = 0; jj < k; ++jj) wr[jj] = 0.f;
        wr[j] = 1.f;
        exact = true;
        break;
      }
      wr[j] = 1.f / (std::sqrt(d2) + 1e-8f);
      sum += wr[j];
    }
    if (!exact)
      for (int j = 0; j < k; ++j) wr[j] = static_cast<float>(wr[j] / sum);
  }
  return plan;
}

/// Applies an interpolation plan to coarse features: [M x C] -> [F x C].
/// Weights are constant; gradients scatter back with the same weights.
template <class S>
Var upsample_interpolate(TapeT<S>& t, Var coarse_features, const InterpPlan& plan) {
  const auto& x = t.val(coarse_features);
  check(x.ndim() == 2, "upsample_interpolate: features must be [M x C]");
  Var g = ops::gather_rows(t, coarse_features, plan.idx);
  std::vector<S> w(plan.w.begin(), plan.w.end());
  return ops::weighted_neighbor_sum(t, g, std::move(w));
}

// ---------------------------------------------------------------------------
// Multi-level decoders
// ---------------------------------------------------------------------------

/// Skip-fusion MLPs and per-level classification heads hanging off the
/// shared upsampling ladder; both arrays are indexed by level.
struct DecoderStack {
  std::array<LinearParams, 3> skip;   // fuser producing G_l, l = 0..2
  std::array<LinearParams, 4> heads;  // G_l -> C logits, l = 0..3
};

/// Shared ladder: G3 is the fused bottom feature; each finer level fuses its
/// encoder skip with the upsampled coarser feature once (G_l = M(F_l ||
/// up(G_{l+1}))), and every level's head taps the ladder. `skip_features` and
/// `up_plans` (level l+1 -> l) are indexed by level. Logits are indexed by
/// level too: {S0 .. S3}, S0 finest.
template <class S>
std::array<Var, 4> multilevel_decode(TapeT<S>& t, Var fused,
                                     const std::array<Var, 3>& skip_features,
                                     const std::array<InterpPlan, 3>& up_plans,
                                     const DecoderStack& stack, const ParamVarsT<S>& pv) {
  std::array<Var, 4> logits;
  Var g = fused;
  logits[3] = linear_only(t, g, pv, stack.heads[3]);
  for (int level = 2; level >= 0; --level) {
    Var up = upsample_interpolate(t, g, up_plans[static_cast<size_t>(level)]);
    Var cat = ops::concat(t, {skip_features[static_cast<size_t>(level)], up});
    g = linear_relu(t, cat, pv, stack.skip[static_cast<size_t>(level)]);
    logits[static_cast<size_t>(level)] = linear_only(t, g, pv, stack.heads[static_cast<size_t>(level)]);
  }
  return logits;
}

}  // namespace rffs
