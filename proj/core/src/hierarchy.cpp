#include "rffs/hierarchy.hpp"

#include <string>

#include "rffs/fps.hpp"
#include "rffs/knn.hpp"

namespace rffs {

HierarchyLevels build_hierarchy(const std::vector<Vec3>& points,
                                const std::vector<int32_t>& labels, int k,
                                std::array<int, 3> ratios, uint64_t seed) {
  const int n = static_cast<int>(points.size());
  check(n >= 1, "build_hierarchy: empty point set");
  check(labels.empty() || static_cast<int>(labels.size()) == n,
        "build_hierarchy: label count does not match point count");

  // Validate every level is large enough before doing any work.
  int sz = n;
  for (int l = 0; l < 3; ++l) {
    sz /= ratios[static_cast<size_t>(l)];
    check(sz >= k, "build_hierarchy: level " + std::to_string(l + 1) + " would have " +
                       std::to_string(sz) + " points, fewer than k=" + std::to_string(k));
  }

  HierarchyLevels h;
  h.level(0).xyz = points;
  h.level(0).labels = labels;

  for (int l = 1; l <= 3; ++l) {
    const auto& prev = h.level(l - 1);
    auto& cur = h.level(l);
    const int m = prev.size() / ratios[static_cast<size_t>(l - 1)];
    const uint64_t level_seed = seed == 0 ? 0 : seed_mix(seed, static_cast<uint64_t>(l));
    cur.fps_indices = farthest_point_sampling(prev.xyz, m, level_seed);
    cur.xyz.reserve(static_cast<size_t>(m));
    for (int32_t i : cur.fps_indices) cur.xyz.push_back(prev.xyz[static_cast<size_t>(i)]);
    if (!prev.labels.empty()) {
      cur.labels.reserve(static_cast<size_t>(m));
      for (int32_t i : cur.fps_indices) cur.labels.push_back(prev.labels[static_cast<size_t>(i)]);
    }

    cur.point_graph.mode = Neighborhood::Mode::kPlain;
    cur.point_graph.idx = knn_search(cur.xyz, cur.xyz, k);

    KdTree finer(prev.xyz);
    cur.mapping.mode = Neighborhood::Mode::kPlain;
    cur.mapping.idx = knn_search(finer, cur.xyz, k);
  }
  return h;
}

std::array<std::vector<int32_t>, 4> downsample_labels(
    const std::vector<int32_t>& labels, const std::array<std::vector<int32_t>, 3>& fps_chain) {
  std::array<std::vector<int32_t>, 4> out;
  out[0] = labels;
  for (int l = 1; l <= 3; ++l) {
    const auto& prev = out[static_cast<size_t>(l - 1)];
    const auto& idx = fps_chain[static_cast<size_t>(l - 1)];
    auto& cur = out[static_cast<size_t>(l)];
    cur.reserve(idx.size());
    for (int32_t i : idx) {
      check(i >= 0 && i < static_cast<int32_t>(prev.size()),
            "downsample_labels: fps index " + std::to_string(i) + " out of range");
      cur.push_back(prev[static_cast<size_t>(i)]);
    }
  }
  return out;
}

}  // namespace rffs
