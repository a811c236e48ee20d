#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rffs/blocks.hpp"
#include "rffs/hierarchy.hpp"
#include "rffs/layers.hpp"
#include "rffs/loss.hpp"
#include "rffs/params.hpp"
#include "rffs/pointcloud.hpp"
#include "rffs/sparse_knn.hpp"
#include "rffs/tape.hpp"

namespace rffs {

/// Network hyperparameters. Serializable to/from JSON (see arch_to_json /
/// arch_from_json); checkpoints embed it for compatibility checking.
struct ArchConfig {
  int input_channels = 3;
  int classes = 5;
  std::array<int, 3> encoder_channels{64, 128, 256};  // levels 1..3
  int branch_channels = 64;                           // C' per cascade layer
  int fused_channels = 256;
  std::array<int, 3> decoder_channels{128, 128, 256};  // G_l width, levels 0..2
  std::vector<int> dilations{1, 2, 4, 8};
  int delta = 4;
  int k = 32;
  std::array<int, 3> level_ratios{4, 4, 2};
  bool dense_connections = true;
  BranchAggregation aggregation = BranchAggregation::kConcat;

  void validate() const;
  bool operator==(const ArchConfig&) const = default;
};

std::string arch_to_json(const ArchConfig& cfg);
ArchConfig arch_from_json(const std::string& json_text);
ArchConfig load_arch_file(const std::string& path);

/// Everything the forward pass needs for one block, precomputable once and
/// reused across epochs: the hierarchy, the level-3 dilated/annular graphs,
/// interpolation plans, relative-position tensors and input features.
struct BlockData {
  HierarchyLevels hier;
  std::vector<Neighborhood> dag_dilated;
  std::vector<Neighborhood> dag_annular;
  std::array<TensorT<float>, 3> relpos;  // encoder edge geometry, levels 1..3
  std::array<InterpPlan, 3> up;          // level l+1 -> l, indexed by l
  TensorT<float> features;               // [N x input_channels]
};

/// Smallest level-3 population the configured graphs require.
int min_level3_points(const ArchConfig& cfg);
/// Smallest input size whose level ladder satisfies min_level3_points.
int min_input_points(const ArchConfig& cfg);

/// Builds BlockData from normalized coordinates (+ optional unscaled
/// attributes and labels). Seed feeds FPS start selection.
BlockData prepare_block_data(const ArchConfig& cfg, const std::vector<Vec3>& normalized_xyz,
                             const std::vector<float>& attrs, int attr_dim,
                             const std::vector<int32_t>& labels, uint64_t seed);

/// The full network: shared three-level encoder, fusion module at the
/// bottom, shared upsampling ladder with per-level heads.
template <class S>
class RffsNetT {
 public:
  RffsNetT(const ArchConfig& cfg, uint64_t init_seed);

  struct Forward {
    std::array<Var, 4> logits;  // by level, S0 finest
    ParamVarsT<S> params;
  };

  Forward forward(TapeT<S>& tape, const BlockData& block, bool requires_grad) const;

  const ArchConfig& config() const { return cfg_; }
  ParamStoreT<S>& params() { return params_; }
  const ParamStoreT<S>& params() const { return params_; }

 private:
  ArchConfig cfg_;
  mutable ParamStoreT<S> params_;
  std::array<LinearParams, 3> encoder_;
  DagFusionParams dag_;
  DecoderStack decoder_;
};

using RffsNet = RffsNetT<float>;

// ---------------------------------------------------------------------------
// implementation
// ---------------------------------------------------------------------------

inline void ArchConfig::validate() const {
  check(input_channels >= 1, "arch: input_channels must be >= 1");
  check(classes >= 2, "arch: classes must be >= 2");
  for (int c : encoder_channels) check(c >= 1, "arch: encoder channels must be >= 1");
  for (int c : decoder_channels) check(c >= 1, "arch: decoder channels must be >= 1");
  check(branch_channels >= 1 && fused_channels >= 1, "arch: fusion channels must be >= 1");
  check(!dilations.empty(), "arch: dilation list must not be empty");
  for (size_t i = 0; i < dilations.size(); ++i) {
    check(dilations[i] >= 1, "arch: dilation rates must be >= 1");
    if (i > 0)
      check(dilations[i] > dilations[i - 1], "arch: dilation rates must be strictly increasing");
  }
  check(delta >= 1, "arch: delta must be >= 1");
  check(k >= 1, "arch: k must be >= 1");
  for (int r : level_ratios) check(r >= 2, "arch: level ratios must be >= 2");
}

inline int min_level3_points(const ArchConfig& cfg) {
  int need = cfg.k;
  for (int r : cfg.dilations) need = std::max(need, expansion_size(cfg.k, cfg.delta, r));
  // positional annular rings: ring m covers ranks ((m-1)k, mk]
  need = std::max(need, static_cast<int>(cfg.dilations.size()) * cfg.k);
  return need;
}

inline int min_input_points(const ArchConfig& cfg) {
  const int need3 = min_level3_points(cfg);
  int n = need3;
  for (int i = 2; i >= 0; --i) n *= cfg.level_ratios[static_cast<size_t>(i)];
  // floor division can undershoot; bump until the ladder fits
  auto level3 = [&](int n0) {
    int s = n0;
    for (int r : cfg.level_ratios) s /= r;
    return s;
  };
  while (level3(n) < need3) ++n;
  return n;
}

template <class S>
RffsNetT<S>::RffsNetT(const ArchConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(init_seed, /*stream=*/0x494e4954ULL);
  const int m = static_cast<int>(cfg_.dilations.size());
  const bool cat = cfg_.aggregation == BranchAggregation::kConcat;

  // Encoder edge maps: concat(relpos, finer feature) -> level channels.
  int in_ch = cfg_.input_channels;
  for (int l = 0; l < 3; ++l) {
    const int out_ch = cfg_.encoder_channels[static_cast<size_t>(l)];
    encoder_[static_cast<size_t>(l)] =
        make_linear(params_, "enc" + std::to_string(l + 1), 3 + in_ch, out_ch, rng);
    in_ch = out_ch;
  }
  const int bottom = in_ch;

  // Fusion cascades. Edge maps take 2x their input width (center, relative).
  auto cascade_in = [&](int layer) {
    if (layer == 0) return bottom;
    if (!cfg_.dense_connections) return cfg_.branch_channels;
    return cat ? bottom + layer * cfg_.branch_channels : cfg_.branch_channels;
  };
  for (int i = 0; i < m; ++i) {
    dag_.dg.push_back(make_linear(params_, "dag.dg" + std::to_string(i + 1), 2 * cascade_in(i),
                                  cfg_.branch_channels, rng));
  }
  for (int i = 0; i < m; ++i) {
    dag_.ad.push_back(make_linear(params_, "dag.ad" + std::to_string(i + 1), 2 * cascade_in(i),
                                  cfg_.branch_channels, rng));
  }
  const int collected = cat ? bottom + m * cfg_.branch_channels : cfg_.branch_channels;
  dag_.reduce_dg = make_linear(params_, "dag.m1", collected, cfg_.fused_channels, rng);
  dag_.reduce_ad = make_linear(params_, "dag.m2", collected, cfg_.fused_channels, rng);
  dag_.fuse = make_linear(params_, "dag.fuse", 2 * cfg_.fused_channels, cfg_.fused_channels, rng);

  // Decoder ladder, coarse to fine. Skip widths: encoder channels at levels
  // 2 and 1, raw input at level 0.
  const std::array<int, 3> skip_ch{cfg_.input_channels, cfg_.encoder_channels[0],
                                   cfg_.encoder_channels[1]};
  int above = cfg_.fused_channels;  // width of G_{l+1}
  for (int l = 2; l >= 0; --l) {
    const int out_ch = cfg_.decoder_channels[static_cast<size_t>(l)];
    decoder_.skip[static_cast<size_t>(l)] =
        make_linear(params_, "dec" + std::to_string(l),
                    skip_ch[static_cast<size_t>(l)] + above, out_ch, rng);
    above = out_ch;
  }
  decoder_.heads[3] = make_linear(params_, "head3", cfg_.fused_channels, cfg_.classes, rng);
  for (int l = 2; l >= 0; --l)
    decoder_.heads[static_cast<size_t>(l)] =
        make_linear(params_, "head" + std::to_string(l),
                    cfg_.decoder_channels[static_cast<size_t>(l)], cfg_.classes, rng);
}

template <class S>
typename RffsNetT<S>::Forward RffsNetT<S>::forward(TapeT<S>& tape, const BlockData& block,
                                                   bool requires_grad) const {
  check(block.features.last_dim() == cfg_.input_channels,
        "forward: block has " + std::to_string(block.features.last_dim()) +
            " input channels, architecture expects " + std::to_string(cfg_.input_channels));
  Forward fw{.logits = {}, .params = ParamVarsT<S>::push_all(tape, params_, requires_grad)};
  const auto& pv = fw.params;

  Var f0 = tape.leaf(detail::to_scalar_type<S>(block.features), false);
  std::array<Var, 3> skips{f0, Var{}, Var{}};
  Var cur = f0;
  for (int l = 1; l <= 3; ++l) {
    cur = encoder_extract(tape, cur, block.hier, l, block.relpos[static_cast<size_t>(l - 1)], pv,
                          encoder_[static_cast<size_t>(l - 1)]);
    if (l <= 2) skips[static_cast<size_t>(l)] = cur;
  }

  Var fused = dagfusion_forward(tape, cur, block.dag_dilated, block.dag_annular, dag_,
                                cfg_.dense_connections, cfg_.aggregation, pv);
  fw.logits = multilevel_decode(tape, fused, skips, block.up, decoder_, pv);
  return fw;
}

}  // namespace rffs
