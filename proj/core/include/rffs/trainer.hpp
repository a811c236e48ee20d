#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "rffs/adam.hpp"
#include "rffs/loss.hpp"
#include "rffs/metrics.hpp"
#include "rffs/model.hpp"
#include "rffs/pointcloud.hpp"

namespace rffs {

struct TrainConfig {
  int epochs = 500;
  int batch_size = 16;
  AdamConfig adam;
  uint64_t seed = 0;
  LossWeights weights;
  LossReduction reduction = LossReduction::kMean;

  void validate() const {
    check(epochs >= 1, "TrainConfig: epochs must be >= 1");
    check(batch_size >= 1, "TrainConfig: batch size must be >= 1");
    check(adam.lr > 0.f, "TrainConfig: learning rate must be positive");
    weights.validate();
  }
};

struct EpochStats {
  int epoch = 0;
  double total_loss = 0;
  std::array<double, 4> level_losses{0, 0, 0, 0};
  double oa = 0, mf1 = 0, miou = 0;
};

/// Return false to stop before the configured epoch count.
using EpochCallback = std::function<bool(const EpochStats&)>;

/// Runs the multi-resolution training loop over prepared blocks: per batch a
/// fresh tape, forward, weighted loss, backward, one Adam step on the
/// batch-mean gradients. Block order reshuffles per epoch from (seed, epoch);
/// everything else is a pure function of the inputs, so runs are
/// bit-deterministic. Training metrics (OA/mF1/mIoU) come from the finest
/// logits of each forward pass. A non-finite loss aborts, naming the batch.
std::vector<EpochStats> train(RffsNet& net, AdamState& opt, const TrainConfig& cfg,
                              const std::vector<BlockData>& blocks, int start_epoch = 0,
                              const EpochCallback& on_epoch = {});

/// Argmax of the finest-level logits for one prepared block.
std::vector<int32_t> predict_block(const RffsNet& net, const BlockData& block);

/// End-to-end prediction for a raw block cloud: normalizes, builds geometry,
/// runs the network at native size when the configured graphs fit, otherwise
/// pads by seeded resampling-with-replacement and maps predictions back.
std::vector<int32_t> predict_cloud(const RffsNet& net, const PointCloud& cloud, uint64_t seed);

/// prepare_block_data plus the normalize step, for a raw (already sampled)
/// block cloud.
BlockData prepare_cloud(const ArchConfig& cfg, const PointCloud& cloud, uint64_t seed);

}  // namespace rffs
