#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/neighborhood.hpp"

namespace rffs {

/// Four-resolution pyramid: level 0 is the input set; levels 1..3 are FPS
/// subsets of the previous level with default size ratios (4, 4, 2), giving
/// N, N/4, N/16, N/32. Each coarse level carries
///   - fps_indices: positions of its points inside the previous level,
///   - point_graph: k nearest neighbors within the level (levels 1..3),
///   - mapping:     k nearest previous-level neighbors per point, used for
///                  pooling and interpolation,
///   - labels:      previous-level labels copied through fps_indices.
/// All neighbor searches run on the original 3D coordinates.
struct HierarchyLevels {
  struct Level {
    std::vector<Vec3> xyz;
    std::vector<int32_t> fps_indices;
    Neighborhood point_graph;
    Neighborhood mapping;
    std::vector<int32_t> labels;

    int size() const { return static_cast<int>(xyz.size()); }
  };

  std::array<Level, 4> levels;

  const Level& level(int i) const { return levels[static_cast<size_t>(i)]; }
  Level& level(int i) { return levels[static_cast<size_t>(i)]; }
};

HierarchyLevels build_hierarchy(const std::vector<Vec3>& points,
                                const std::vector<int32_t>& labels, int k = 32,
                                std::array<int, 3> ratios = {4, 4, 2}, uint64_t seed = 0);

/// A_l[i] = A_{l-1}[fps_indices_l[i]] down the sampling chain.
std::array<std::vector<int32_t>, 4> downsample_labels(
    const std::vector<int32_t>& labels, const std::array<std::vector<int32_t>, 3>& fps_chain);

}  // namespace rffs
