#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rffs/pointcloud.hpp"

namespace rffs {

/// Synthetic labeled scene for desk-scale training: a noisy ground plane,
/// box-shaped buildings, thin vertical poles carrying horizontal lines, and
/// blobbed vegetation clusters. Deterministic under seed.
struct SynthSpec {
  /// Subset of {"ground","building","pole","line","vegetation"}; ground is
  /// always generated.
  std::vector<std::string> classes{"ground", "building", "pole", "line", "vegetation"};
  double extent = 30.0;    // square side, meters
  double density = 4.55;   // points per square meter (total over all classes)
  uint64_t seed = 0;
};

/// Canonical 5-class palette in label order.
ClassMap synth_class_map(const std::vector<std::string>& classes);

PointCloud synth_scene(const SynthSpec& spec);

}  // namespace rffs
