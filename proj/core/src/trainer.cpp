#include "rffs/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "rffs/blocks.hpp"

namespace rffs {

namespace {

std::array<const std::vector<int32_t>*, 4> level_labels(const BlockData& block) {
  return {&block.hier.level(0).labels, &block.hier.level(1).labels, &block.hier.level(2).labels,
          &block.hier.level(3).labels};
}

std::vector<int32_t> argmax_rows(const Tensor& logits) {
  const int n = logits.dim(0), c = logits.dim(1);
  std::vector<int32_t> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const float* row = logits.data.data() + static_cast<int64_t>(i) * c;
    int best = 0;
    for (int j = 1; j < c; ++j)
      if (row[j] > row[best]) best = j;
    out[static_cast<size_t>(i)] = best;
  }
  return out;
}

}  // namespace

std::vector<EpochStats> train(RffsNet& net, AdamState& opt, const TrainConfig& cfg,
                              const std::vector<BlockData>& blocks, int start_epoch,
                              const EpochCallback& on_epoch) {
  cfg.validate();
  check(!blocks.empty(), "train: at least one block required");
  for (const auto& b : blocks)
    check(!b.hier.level(0).labels.empty(), "train: blocks must carry labels");

  const int classes = net.config().classes;
  std::vector<EpochStats> history;
  std::vector<Tensor> grad_sum;

  for (int epoch = start_epoch; epoch < start_epoch + cfg.epochs; ++epoch) {
    // Seeded per-epoch order; reproducible independent of prior epochs so
    // resumed runs continue identically.
    std::vector<int> order(blocks.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng shuffle_rng(seed_mix(cfg.seed, static_cast<uint64_t>(epoch)), 0x5348464cULL);
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      const size_t j = i + shuffle_rng.below(static_cast<uint32_t>(order.size() - i));
      std::swap(order[i], order[j]);
    }

    EpochStats stats;
    stats.epoch = epoch;
    ConfusionMatrix cm(classes);
    int batch_id = 0;
    size_t cursor = 0;
    int total_blocks = 0;
    while (cursor < order.size()) {
      const size_t take = std::min<size_t>(static_cast<size_t>(cfg.batch_size),
                                           order.size() - cursor);
      grad_sum.assign(static_cast<size_t>(net.params().count()), Tensor{});
      double batch_loss = 0;

      for (size_t bi = 0; bi < take; ++bi) {
        const BlockData& block = blocks[static_cast<size_t>(order[cursor + bi])];
        Tape tape;
        RffsNet::Forward fw;
        double lv = 0;
        MrfaLossResult<float> loss;
        try {
          fw = net.forward(tape, block, /*requires_grad=*/true);
          loss = mrfa_loss(tape, fw.logits, level_labels(block), cfg.weights, cfg.reduction);
          lv = static_cast<double>(tape.val(loss.total).data[0]);
        } catch (const std::runtime_error& e) {
          throw std::runtime_error("train: epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_id) + ": " + e.what());
        }
        if (!std::isfinite(lv))
          throw std::runtime_error("train: non-finite loss in epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_id));
        batch_loss += lv;
        for (int l = 0; l < 4; ++l)
          stats.level_losses[static_cast<size_t>(l)] += loss.per_level_value[static_cast<size_t>(l)];
        tape.backward(loss.total);
        for (int p = 0; p < net.params().count(); ++p) {
          Tensor g = tape.grad(fw.params[p]);
          auto& acc = grad_sum[static_cast<size_t>(p)];
          if (acc.data.empty()) {
            acc = std::move(g);
          } else {
            for (int64_t i = 0; i < acc.numel(); ++i)
              acc.data[static_cast<size_t>(i)] += g.data[static_cast<size_t>(i)];
          }
        }
        const auto pred = argmax_rows(tape.val(fw.logits[0]));
        cm.merge(confusion(block.hier.level(0).labels, pred, classes));
      }

      if (take > 1) {
        const float inv = 1.f / static_cast<float>(take);
        for (auto& g : grad_sum)
          for (float& v : g.data) v *= inv;
      }
      adam_step(net.params(), grad_sum, opt);
      stats.total_loss += batch_loss;
      ++batch_id;
      cursor += take;
      total_blocks += static_cast<int>(take);
    }

    stats.total_loss /= total_blocks;
    for (auto& v : stats.level_losses) v /= total_blocks;
    const MetricsReport rep = per_class_metrics(cm, ClassMap::generic(classes));
    stats.oa = rep.oa;
    stats.mf1 = rep.mf1;
    stats.miou = rep.miou;
    history.push_back(stats);
    if (on_epoch && !on_epoch(stats)) break;
  }
  return history;
}

std::vector<int32_t> predict_block(const RffsNet& net, const BlockData& block) {
  Tape tape;
  auto fw = net.forward(tape, block, /*requires_grad=*/false);
  return argmax_rows(tape.val(fw.logits[0]));
}

BlockData prepare_cloud(const ArchConfig& cfg, const PointCloud& cloud, uint64_t seed) {
  NormalizeResult norm = normalize_block(cloud.xyz);
  return prepare_block_data(cfg, norm.xyz, cloud.attrs, cloud.attr_dim, cloud.labels, seed);
}

std::vector<int32_t> predict_cloud(const RffsNet& net, const PointCloud& cloud, uint64_t seed) {
  const ArchConfig& cfg = net.config();
  const int n = cloud.size();
  const int min_n = min_input_points(cfg);
  if (n >= min_n) {
    BlockData block = prepare_cloud(cfg, cloud, seed);
    return predict_block(net, block);
  }
  // Too small for the configured graphs: pad with seeded resampling. The
  // sample lists every original point first, so predictions map back by
  // position.
  const std::vector<int32_t> sample = sample_block(n, min_n, seed);
  PointCloud padded = extract_points(cloud, sample);
  BlockData block = prepare_cloud(cfg, padded, seed);
  std::vector<int32_t> padded_pred = predict_block(net, block);
  return std::vector<int32_t>(padded_pred.begin(), padded_pred.begin() + n);
}

}  // namespace rffs
