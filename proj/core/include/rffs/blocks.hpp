#pragma once

#include <cstdint>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/pointcloud.hpp"

namespace rffs {

/// One horizontal partition cell: origin/extent in meters plus the member
/// point indices into the parent cloud. Cells of one partition are disjoint
/// and exhaustive.
struct Block {
  std::array<double, 2> origin{0, 0};
  std::array<double, 2> extent{0, 0};
  std::vector<int32_t> point_indices;

  int count() const { return static_cast<int>(point_indices.size()); }
};

/// Axis-aligned grid of `block_size` x `block_size` cells anchored at the
/// cloud's min x/y. Cells holding fewer than `min_count` points are merged
/// into the nearest (by member centroid) sufficiently large block; the
/// receiving block's extent grows to the union bounding box.
std::vector<Block> partition_blocks(const PointCloud& cloud, double block_size,
                                    int min_count = 64);

/// Deterministic block sampling: without replacement when the block has at
/// least n_target points, otherwise every point once plus uniform resampling
/// with replacement up to n_target.
std::vector<int32_t> sample_block(int block_point_count, int n_target, uint64_t seed);

/// Centers on the horizontal centroid and the minimum height, then divides
/// by one shared scale (max absolute extent). Returns {offset, scale};
/// degenerate all-identical input clamps scale to 1.
struct NormalizeResult {
  std::vector<Vec3> xyz;
  Vec3 offset;
  float scale = 1.f;
};
NormalizeResult normalize_block(const std::vector<Vec3>& xyz);

/// Gathers a sub-cloud (coordinates, attributes, labels) by index.
PointCloud extract_points(const PointCloud& cloud, const std::vector<int32_t>& indices);

}  // namespace rffs
