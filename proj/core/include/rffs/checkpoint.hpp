#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rffs/adam.hpp"
#include "rffs/model.hpp"

namespace rffs {

/// Checkpoint container: architecture, training position, optimizer
/// hyperparameters and every named f32 tensor (parameters plus optimizer
/// moments as "opt.m/<name>" / "opt.v/<name>").
///
/// File layout: 8-byte magic "RFFSCKPT", u32 version, u64 JSON header length,
/// JSON header (tensor names, shapes, byte offsets), then little-endian f32
/// arrays at the declared offsets.
struct Checkpoint {
  ArchConfig arch;
  int64_t epoch = 0;
  uint64_t seed = 0;
  AdamConfig adam_cfg;
  int64_t adam_step = 0;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* find(const std::string& name) const;
};

constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const RffsNet& net, const AdamState& opt,
                     int64_t epoch, uint64_t seed);

/// Validates magic, version and total size before reading any tensor; a
/// truncated or foreign file never yields a partial load.
Checkpoint load_checkpoint(const std::string& path);

/// Rebuilds a network from a checkpoint (architecture + parameters).
RffsNet net_from_checkpoint(const Checkpoint& ck);

/// Restores optimizer state aligned with the given network's parameters.
AdamState adam_from_checkpoint(const Checkpoint& ck, const RffsNet& net);

}  // namespace rffs
