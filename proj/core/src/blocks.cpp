#include "rffs/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace rffs {

std::vector<Block> partition_blocks(const PointCloud& cloud, double block_size, int min_count) {
  check(cloud.size() >= 1, "partition_blocks: empty cloud");
  check(block_size > 0, "partition_blocks: block size must be positive");

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  for (const Vec3& p : cloud.xyz) {
    min_x = std::min(min_x, static_cast<double>(p.x));
    min_y = std::min(min_y, static_cast<double>(p.y));
  }

  // Grid cells keyed by (cy, cx) so block ids run row-major.
  std::map<std::pair<int64_t, int64_t>, Block> grid;
  for (int i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.xyz[static_cast<size_t>(i)];
    const int64_t cx = static_cast<int64_t>(std::floor((p.x - min_x) / block_size));
    const int64_t cy = static_cast<int64_t>(std::floor((p.y - min_y) / block_size));
    auto& b = grid[{cy, cx}];
    if (b.point_indices.empty()) {
      b.origin = {min_x + cx * block_size, min_y + cy * block_size};
      b.extent = {block_size, block_size};
    }
    b.point_indices.push_back(i);
  }

  std::vector<Block> blocks;
  blocks.reserve(grid.size());
  for (auto& [key, b] : grid) blocks.push_back(std::move(b));

  auto centroid = [&](const Block& b) {
    double cx = 0, cy = 0;
    for (int32_t i : b.point_indices) {
      cx += cloud.xyz[static_cast<size_t>(i)].x;
      cy += cloud.xyz[static_cast<size_t>(i)].y;
    }
    return std::array<double, 2>{cx / b.count(), cy / b.count()};
  };

  // Merge undersized blocks, smallest first, into the nearest block that
  // meets the threshold (nearest of the rest if none does).
  for (;;) {
    if (blocks.size() <= 1) break;
    int victim = -1;
    for (size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i].count() < min_count &&
          (victim < 0 || blocks[i].count() < blocks[static_cast<size_t>(victim)].count()))
        victim = static_cast<int>(i);
    if (victim < 0) break;

    const auto vc = centroid(blocks[static_cast<size_t>(victim)]);
    int target = -1;
    double target_d2 = 0;
    bool target_big = false;
    for (size_t i = 0; i < blocks.size(); ++i) {
      if (static_cast<int>(i) == victim) continue;
      const bool big = blocks[i].count() >= min_count;
      const auto c = centroid(blocks[i]);
      const double dx = c[0] - vc[0], dy = c[1] - vc[1];
      const double d2 = dx * dx + dy * dy;
      const bool better = target < 0 || (big && !target_big) ||
                          (big == target_big && d2 < target_d2);
      if (better) {
        target = static_cast<int>(i);
        target_d2 = d2;
        target_big = big;
      }
    }

    Block& dst = blocks[static_cast<size_t>(target)];
    Block& src = blocks[static_cast<size_t>(victim)];
    const double x0 = std::min(dst.origin[0], src.origin[0]);
    const double y0 = std::min(dst.origin[1], src.origin[1]);
    const double x1 = std::max(dst.origin[0] + dst.extent[0], src.origin[0] + src.extent[0]);
    const double y1 = std::max(dst.origin[1] + dst.extent[1], src.origin[1] + src.extent[1]);
    dst.origin = {x0, y0};
    dst.extent = {x1 - x0, y1 - y0};
    dst.point_indices.insert(dst.point_indices.end(), src.point_indices.begin(),
                             src.point_indices.end());
    std::sort(dst.point_indices.begin(), dst.point_indices.end());
    blocks.erase(blocks.begin() + victim);
  }
  return blocks;
}

std::vector<int32_t> sample_block(int block_point_count, int n_target, uint64_t seed) {
  check(block_point_count >= 1, "sample_block: empty block");
  check(n_target >= 1, "sample_block: n_target must be >= 1");
  Rng rng(seed, /*stream=*/0x53414d50ULL);
  const int n = block_point_count;
  std::vector<int32_t> out;
  out.reserve(static_cast<size_t>(n_target));
  if (n >= n_target) {
    // Partial Fisher-Yates: first n_target entries of a seeded permutation.
    std::vector<int32_t> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    for (int i = 0; i < n_target; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<uint32_t>(n - i)));
      std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
      out.push_back(perm[static_cast<size_t>(i)]);
    }
  } else {
    for (int i = 0; i < n; ++i) out.push_back(i);
    for (int i = n; i < n_target; ++i)
      out.push_back(static_cast<int32_t>(rng.below(static_cast<uint32_t>(n))));
  }
  return out;
}

NormalizeResult normalize_block(const std::vector<Vec3>& xyz) {
  check(!xyz.empty(), "normalize_block: empty block");
  NormalizeResult res;
  double cx = 0, cy = 0;
  float min_z = std::numeric_limits<float>::infinity();
  for (const Vec3& p : xyz) {
    cx += p.x;
    cy += p.y;
    min_z = std::min(min_z, p.z);
  }
  res.offset = Vec3{static_cast<float>(cx / xyz.size()), static_cast<float>(cy / xyz.size()),
                    min_z};
  float max_abs = 0.f;
  res.xyz.reserve(xyz.size());
  for (const Vec3& p : xyz) {
    const Vec3 q = p - res.offset;
    res.xyz.push_back(q);
    max_abs = std::max({max_abs, std::abs(q.x), std::abs(q.y), std::abs(q.z)});
  }
  res.scale = max_abs > 0.f ? max_abs : 1.f;
  if (res.scale != 1.f)
    for (Vec3& q : res.xyz) {
      q.x /= res.scale;
      q.y /= res.scale;
      q.z /= res.scale;
    }
  return res;
}

PointCloud extract_points(const PointCloud& cloud, const std::vector<int32_t>& indices) {
  PointCloud out;
  out.attr_dim = cloud.attr_dim;
  out.xyz.reserve(indices.size());
  for (int32_t i : indices) {
    check(i >= 0 && i < cloud.size(), "extract_points: index out of range");
    out.xyz.push_back(cloud.xyz[static_cast<size_t>(i)]);
    for (int a = 0; a < cloud.attr_dim; ++a)
      out.attrs.push_back(cloud.attrs[static_cast<size_t>(i) * cloud.attr_dim + a]);
    if (cloud.has_labels()) out.labels.push_back(cloud.labels[static_cast<size_t>(i)]);
  }
  return out;
}

}  // namespace rffs
