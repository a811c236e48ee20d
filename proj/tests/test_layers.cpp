#include "doctest.h"

#include <cmath>

#include "rffs/layers.hpp"
#include "rffs/loss.hpp"
#include "rffs/model.hpp"
#include "rffs/sparse_knn.hpp"
#include "testutil.hpp"

using namespace rffs;

namespace {

/// Toy architecture small enough for finite differences: 64 points, ladder
/// 64/32/16/8, k=4, rates {1,2}.
ArchConfig toy_arch() {
  ArchConfig cfg;
  cfg.input_channels = 3;
  cfg.classes = 3;
  cfg.encoder_channels = {4, 6, 8};
  cfg.branch_channels = 4;
  cfg.fused_channels = 8;
  cfg.decoder_channels = {6, 6, 8};
  cfg.dilations = {1, 2};
  cfg.delta = 2;
  cfg.k = 4;
  cfg.level_ratios = {2, 2, 2};
  return cfg;
}

BlockData toy_block(uint64_t seed, int n = 64, const ArchConfig& cfg = toy_arch()) {
  Rng rng(seed);
  auto pts = testutil::random_cloud(n, rng, 4.f);
  std::vector<int32_t> labels(static_cast<size_t>(n));
  for (auto& l : labels) l = static_cast<int32_t>(rng.below(static_cast<uint32_t>(cfg.classes)));
  NormalizeResult norm = normalize_block(pts);
  return prepare_block_data(cfg, norm.xyz, {}, 0, labels, 0);
}

/// Dilated graph whose every row repeats the center index.
Neighborhood self_graph(int n, int k) {
  Neighborhood nb;
  nb.mode = Neighborhood::Mode::kDilated;
  nb.idx = detail::center_index(n, k);
  return nb;
}

}  // namespace

TEST_CASE("dgconv: output shape contract") {
  Rng rng(50);
  auto pts = testutil::random_cloud(20, rng);
  Neighborhood g = sparse_knn(pts, pts, 4, 2, 2);
  ParamStoreT<float> store;
  Rng prng(1);
  LinearParams lp = make_linear(store, "edge", 2 * 5, 7, prng);
  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Tensor x({20, 5});
  for (auto& v : x.data) v = rng.uniformf(-1, 1);
  Var out = dgconv_forward(t, t.leaf(x), g, pv, lp);
  CHECK(t.val(out).shape == std::vector<int>{20, 7});

  // mode contract: plain graphs are rejected
  Neighborhood plain = g;
  plain.mode = Neighborhood::Mode::kPlain;
  CHECK_THROWS_WITH_AS(dgconv_forward(t, t.leaf(x), plain, pv, lp),
                       doctest::Contains("dilated"), std::invalid_argument);
}

TEST_CASE("dgconv: all-self neighbors reduce to relu(linear([x_i, 0]))") {
  Rng rng(51);
  const int n = 6, c = 3, cout = 5;
  ParamStoreT<float> store;
  Rng prng(2);
  LinearParams lp = make_linear(store, "edge", 2 * c, cout, prng);
  // nonzero bias to catch offset mistakes
  for (auto& v : store.entry(lp.bias).value.data) v = 0.25f;

  Tensor x({n, c});
  for (auto& v : x.data) v = rng.uniformf(-1, 1);

  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Var out = dgconv_forward(t, t.leaf(x), self_graph(n, 4), pv, lp);

  const auto& w = store.entry(lp.weight).value;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cout; ++j) {
      float acc = store.entry(lp.bias).value.data[static_cast<size_t>(j)];
      for (int ci = 0; ci < c; ++ci) acc += x.at(i, ci) * w.at(ci, j);  // relative part is 0
      const float expect = acc > 0 ? acc : 0.f;
      CHECK(t.val(out).at(i, j) == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("dgconv: neighbor-permutation invariance of values") {
  Rng rng(52);
  auto pts = testutil::random_cloud(24, rng);
  Neighborhood g = sparse_knn(pts, pts, 5, 2, 2);
  Neighborhood shuffled = g;
  for (int i = 0; i < shuffled.idx.rows; ++i)
    std::reverse(shuffled.idx.v.begin() + static_cast<int64_t>(i) * 5,
                 shuffled.idx.v.begin() + static_cast<int64_t>(i) * 5 + 5);

  ParamStoreT<float> store;
  Rng prng(3);
  LinearParams lp = make_linear(store, "edge", 2 * 4, 6, prng);
  Tensor x({24, 4});
  for (auto& v : x.data) v = rng.uniformf(-1, 1);

  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Var a = dgconv_forward(t, t.leaf(x), g, pv, lp);
  Var b = dgconv_forward(t, t.leaf(x), shuffled, pv, lp);
  CHECK(t.val(a).data == t.val(b).data);
}

TEST_CASE("dgconv/adconv: finite-difference gradients (features and weights)") {
  Rng rng(53);
  auto pts = testutil::random_cloud(16, rng);
  Neighborhood gd = sparse_knn(pts, pts, 4, 2, 2);
  Neighborhood ga = annular_knn(pts, pts, 4, 5);

  ParamStoreT<double> store;
  Rng prng(4);
  store.add("x", testutil::random_tensor({16, 3}, prng));
  LinearParams lp = make_linear(store, "edge", 6, 5, prng);

  auto dg = testutil::gradcheck(
      store, testutil::with_store(store, [&](TapeT<double>& t, const ParamVarsT<double>& pv) {
        return testutil::projected_loss(t, dgconv_forward(t, pv[0], gd, pv, lp), 11);
      }), 1e-5);
  CHECK(dg.max_rel_err < 1e-4);

  auto ad = testutil::gradcheck(
      store, testutil::with_store(store, [&](TapeT<double>& t, const ParamVarsT<double>& pv) {
        return testutil::projected_loss(t, adconv_forward(t, pv[0], ga, pv, lp), 12);
      }), 1e-5);
  CHECK(ad.max_rel_err < 1e-4);
}

TEST_CASE("adconv: ring-1 graph matches dgconv r=1 with identical weights") {
  Rng rng(54);
  auto pts = testutil::random_cloud(20, rng);
  Neighborhood ring1 = annular_knn(pts, pts, 4, 1);
  Neighborhood dil1 = sparse_knn(pts, pts, 4, 2, 1);

  ParamStoreT<float> store;
  Rng prng(5);
  LinearParams lp = make_linear(store, "edge", 2 * 3, 4, prng);
  Tensor x({20, 3});
  for (auto& v : x.data) v = rng.uniformf(-1, 1);

  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Var a = adconv_forward(t, t.leaf(x), ring1, pv, lp);
  Var b = dgconv_forward(t, t.leaf(x), dil1, pv, lp);
  CHECK(t.val(a).data == t.val(b).data);
}

TEST_CASE("dagfusion: single rate, dense off, equals a manual composition") {
  Rng rng(55);
  auto pts = testutil::random_cloud(18, rng);
  std::vector<Neighborhood> dil{sparse_knn(pts, pts, 4, 2, 1)};
  std::vector<Neighborhood> ann{annular_knn(pts, pts, 4, 1)};

  const int c = 4, cp = 3, fused = 5;
  ParamStoreT<float> store;
  Rng prng(6);
  DagFusionParams p;
  p.dg.push_back(make_linear(store, "dg1", 2 * c, cp, prng));
  p.ad.push_back(make_linear(store, "ad1", 2 * c, cp, prng));
  p.reduce_dg = make_linear(store, "m1", c + cp, fused, prng);
  p.reduce_ad = make_linear(store, "m2", c + cp, fused, prng);
  p.fuse = make_linear(store, "m", 2 * fused, fused, prng);

  Tensor x({18, c});
  for (auto& v : x.data) v = rng.uniformf(-1, 1);

  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Var xin = t.leaf(x);
  Var out = dagfusion_forward(t, xin, dil, ann, p, /*dense=*/false,
                              BranchAggregation::kConcat, pv);

  // manual: one DGConv + one ADConv, per-branch reduce of concat(input, out),
  // then fuse the branch concat
  Var m_dg = linear_relu(t, ops::concat(t, {xin, dgconv_forward(t, xin, dil[0], pv, p.dg[0])}),
                         pv, p.reduce_dg);
  Var m_ad = linear_relu(t, ops::concat(t, {xin, adconv_forward(t, xin, ann[0], pv, p.ad[0])}),
                         pv, p.reduce_ad);
  Var manual = linear_relu(t, ops::concat(t, {m_dg, m_ad}), pv, p.fuse);
  CHECK(t.val(out).data == t.val(manual).data);
}

TEST_CASE("dagfusion: dense cascade channel arithmetic (C + m*C' inputs)") {
  ArchConfig cfg = toy_arch();
  cfg.dilations = {1, 2, 3, 4};
  RffsNetT<float> net(cfg, 7);
  // edge maps take 2x the cascade input: layer m gets bottom + (m-1)*C'
  const int bottom = cfg.encoder_channels[2];
  for (int m = 0; m < 4; ++m) {
    const int idx = net.params().find("dag.dg" + std::to_string(m + 1) + ".weight");
    REQUIRE(idx >= 0);
    CHECK(net.params().entry(idx).value.dim(0) == 2 * (bottom + m * cfg.branch_channels));
  }
  // reduce MLPs consume input + all four outputs
  const int m1 = net.params().find("dag.m1.weight");
  REQUIRE(m1 >= 0);
  CHECK(net.params().entry(m1).value.dim(0) == bottom + 4 * cfg.branch_channels);
}

TEST_CASE("dagfusion: end-to-end finite differences, rates {1,2}") {
  Rng rng(56);
  auto pts = testutil::random_cloud(32, rng);
  std::vector<Neighborhood> dil{sparse_knn(pts, pts, 4, 2, 1), sparse_knn(pts, pts, 4, 2, 2)};
  std::vector<Neighborhood> ann{annular_knn(pts, pts, 4, 1), annular_knn(pts, pts, 4, 5)};

  const int c = 3, cp = 3, fused = 4;
  ParamStoreT<double> store;
  Rng prng(8);
  store.add("x", testutil::random_tensor({32, c}, prng));
  DagFusionParams p;
  p.dg.push_back(make_linear(store, "dg1", 2 * c, cp, prng));
  p.dg.push_back(make_linear(store, "dg2", 2 * (c + cp), cp, prng));
  p.ad.push_back(make_linear(store, "ad1", 2 * c, cp, prng));
  p.ad.push_back(make_linear(store, "ad2", 2 * (c + cp), cp, prng));
  p.reduce_dg = make_linear(store, "m1", c + 2 * cp, fused, prng);
  p.reduce_ad = make_linear(store, "m2", c + 2 * cp, fused, prng);
  p.fuse = make_linear(store, "m", 2 * fused, fused, prng);

  auto res = testutil::gradcheck(
      store, testutil::with_store(store, [&](TapeT<double>& t, const ParamVarsT<double>& pv) {
        Var out = dagfusion_forward(t, pv[0], dil, ann, p, /*dense=*/true,
                                    BranchAggregation::kConcat, pv);
        return testutil::projected_loss(t, out, 13);
      }), 1e-5);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("dagfusion: add aggregation works and is differentiable") {
  Rng rng(57);
  auto pts = testutil::random_cloud(20, rng);
  std::vector<Neighborhood> dil{sparse_knn(pts, pts, 4, 2, 1), sparse_knn(pts, pts, 4, 2, 2)};
  std::vector<Neighborhood> ann{annular_knn(pts, pts, 4, 1), annular_knn(pts, pts, 4, 5)};

  const int c = 3, cp = 4, fused = 4;
  ParamStoreT<double> store;
  Rng prng(9);
  store.add("x", testutil::random_tensor({20, c}, prng));
  DagFusionParams p;
  p.dg.push_back(make_linear(store, "dg1", 2 * c, cp, prng));
  p.dg.push_back(make_linear(store, "dg2", 2 * cp, cp, prng));
  p.ad.push_back(make_linear(store, "ad1", 2 * c, cp, prng));
  p.ad.push_back(make_linear(store, "ad2", 2 * cp, cp, prng));
  p.reduce_dg = make_linear(store, "m1", cp, fused, prng);
  p.reduce_ad = make_linear(store, "m2", cp, fused, prng);
  p.fuse = make_linear(store, "m", 2 * fused, fused, prng);

  auto res = testutil::gradcheck(
      store, testutil::with_store(store, [&](TapeT<double>& t, const ParamVarsT<double>& pv) {
        Var out = dagfusion_forward(t, pv[0], dil, ann, p, /*dense=*/true,
                                    BranchAggregation::kAdd, pv);
        return testutil::projected_loss(t, out, 14);
      }), 1e-5);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("dagfusion: missing graph for a configured rate") {
  Rng rng(58);
  auto pts = testutil::random_cloud(16, rng);
  std::vector<Neighborhood> dil{sparse_knn(pts, pts, 4, 2, 1)};
  std::vector<Neighborhood> ann{annular_knn(pts, pts, 4, 1)};
  ParamStoreT<float> store;
  Rng prng(10);
  DagFusionParams p;
  p.dg.push_back(make_linear(store, "dg1", 6, 3, prng));
  p.dg.push_back(make_linear(store, "dg2", 12, 3, prng));
  p.ad.push_back(make_linear(store, "ad1", 6, 3, prng));
  p.ad.push_back(make_linear(store, "ad2", 12, 3, prng));
  p.reduce_dg = make_linear(store, "m1", 9, 4, prng);
  p.reduce_ad = make_linear(store, "m2", 9, 4, prng);
  p.fuse = make_linear(store, "m", 8, 4, prng);
  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Var x = t.leaf(Tensor({16, 3}, 0.5f));
  CHECK_THROWS_WITH_AS(
      dagfusion_forward(t, x, dil, ann, p, true, BranchAggregation::kConcat, pv),
      doctest::Contains("one dilated graph per configured rate"), std::invalid_argument);
}

TEST_CASE("encoder_extract: translation invariance and gradients") {
  ArchConfig cfg = toy_arch();
  Rng rng(59);
  auto pts = testutil::random_cloud(64, rng, 4.f);
  std::vector<int32_t> labels(64, 0);
  HierarchyLevels h = build_hierarchy(pts, labels, cfg.k, cfg.level_ratios, 0);

  auto shifted_pts = pts;
  for (auto& p : shifted_pts) {
    p.x += 100.f;
    p.y -= 31.f;
    p.z += 7.f;
  }
  HierarchyLevels h2 = build_hierarchy(shifted_pts, labels, cfg.k, cfg.level_ratios, 0);
  REQUIRE(h2.level(1).fps_indices == h.level(1).fps_indices);  // same geometry

  ParamStoreT<float> store;
  Rng prng(11);
  LinearParams lp = make_linear(store, "enc", 3 + 2, 5, prng);
  Tensor feats({64, 2});
  for (auto& v : feats.data) v = rng.uniformf(-1, 1);

  Tape t;
  auto pv = ParamVarsT<float>::push_all(t, store, false);
  Var a = encoder_extract(t, t.leaf(feats), h, 1, mapping_relpos(h, 1), pv, lp);
  Var b = encoder_extract(t, t.leaf(feats), h2, 1, mapping_relpos(h2, 1), pv, lp);
  CHECK(t.val(a).shape == std::vector<int>{32, 5});
  for (int64_t i = 0; i < t.val(a).numel(); ++i)
    CHECK(t.val(a).data[static_cast<size_t>(i)] ==
          doctest::Approx(t.val(b).data[static_cast<size_t>(i)]).epsilon(1e-5));

  ParamStoreT<double> dstore;
  Rng dprng(12);
  dstore.add("feats", testutil::random_tensor({64, 2}, dprng));
  LinearParams dlp = make_linear(dstore, "enc", 5, 4, dprng);
  auto res = testutil::gradcheck(
      dstore, testutil::with_store(dstore, [&](TapeT<double>& t2, const ParamVarsT<double>& pv2) {
        Var out = encoder_extract(t2, pv2[0], h, 1, mapping_relpos(h, 1), pv2, dlp);
        return testutil::projected_loss(t2, out, 15);
      }), 1e-5);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("upsample_interpolate: identity when coarse == fine") {
  Rng rng(60);
  auto pts = testutil::random_cloud(12, rng);
  InterpPlan plan = make_interp_plan(pts, pts);
  Tape t;
  Tensor f({12, 3});
  for (auto& v : f.data) v = rng.uniformf(-2, 2);
  Var out = upsample_interpolate(t, t.leaf(f), plan);
  for (int64_t i = 0; i < f.numel(); ++i)
    CHECK(t.val(out).data[static_cast<size_t>(i)] ==
          doctest::Approx(f.data[static_cast<size_t>(i)]).epsilon(1e-6));
}

TEST_CASE("upsample_interpolate: equidistant pair averages, constants persist") {
  std::vector<Vec3> coarse{Vec3{-1, 0, 0}, Vec3{1, 0, 0}};
  std::vector<Vec3> fine{Vec3{0, 0, 0}, Vec3{0, 2, 0}};
  InterpPlan plan = make_interp_plan(coarse, fine);
  Tape t;
  Tensor f = Tensor::from_rows({{3.f}, {5.f}});
  Var out = upsample_interpolate(t, t.leaf(f), plan);
  CHECK(t.val(out).at(0, 0) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(t.val(out).at(1, 0) == doctest::Approx(4.0).epsilon(1e-6));

  CHECK_THROWS_AS(make_interp_plan({}, fine), std::invalid_argument);
}

TEST_CASE("multilevel_decode: row counts, zero model gives zero logits") {
  ArchConfig cfg = toy_arch();
  BlockData block = toy_block(61);
  RffsNetT<float> net(cfg, 13);

  Tape t;
  auto fw = net.forward(t, block, false);
  CHECK(t.val(fw.logits[0]).shape == std::vector<int>{64, 3});
  CHECK(t.val(fw.logits[1]).shape == std::vector<int>{32, 3});
  CHECK(t.val(fw.logits[2]).shape == std::vector<int>{16, 3});
  CHECK(t.val(fw.logits[3]).shape == std::vector<int>{8, 3});

  // zero parameters + zero input features -> all-zero logits at every level
  RffsNetT<float> zero_net(cfg, 14);
  for (int i = 0; i < zero_net.params().count(); ++i)
    for (auto& v : zero_net.params().entry(i).value.data) v = 0.f;
  BlockData zero_block = block;
  for (auto& v : zero_block.features.data) v = 0.f;
  Tape t2;
  auto zfw = zero_net.forward(t2, zero_block, false);
  for (const auto& lv : zfw.logits)
    for (float v : t2.val(lv).data) CHECK(v == 0.f);
}

TEST_CASE("full ladder: finite differences through forward + mrfa loss") {
  ArchConfig cfg = toy_arch();
  BlockData block = toy_block(62);
  RffsNetT<double> net(cfg, 15);
  testutil::randomize_biases(net.params(), 16);
  LossWeights w;
  w.lambda = {1.f, 0.3f, 0.3f, 0.3f};

  auto res = testutil::gradcheck(
      net.params(), [&](TapeT<double>& t, std::vector<Var>& pvars) {
        auto fw = net.forward(t, block, true);
        pvars = fw.params.vars;
        auto loss = mrfa_loss(t, fw.logits,
                              {&block.hier.level(0).labels, &block.hier.level(1).labels,
                               &block.hier.level(2).labels, &block.hier.level(3).labels},
                              w);
        return loss.total;
      },
      1e-5);
  INFO("worst entry: ", res.worst);
  CHECK(res.max_rel_err < 1e-4);
}
