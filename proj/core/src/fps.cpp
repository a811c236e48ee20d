#include "rffs/fps.hpp"

#include <limits>

namespace rffs {

std::vector<int32_t> farthest_point_sampling(const std::vector<Vec3>& points, int m,
                                             uint64_t seed) {
  const int n = static_cast<int>(points.size());
  check(n >= 1, "farthest_point_sampling: empty point set");
  check(m >= 1 && m <= n, "farthest_point_sampling: m=" + std::to_string(m) +
                              " out of range [1," + std::to_string(n) + "]");
  int32_t start = 0;
  if (seed != 0) {
    Rng rng(seed, /*stream=*/0x46505331ULL);
    start = static_cast<int32_t>(rng.below(static_cast<uint32_t>(n)));
  }

  std::vector<int32_t> picked;
  picked.reserve(static_cast<size_t>(m));
  picked.push_back(start);

  // min squared distance from each point to the selected set, updated
  // incrementally after every pick. Already-picked indices are excluded so
  // duplicate coordinates cannot produce duplicate picks.
  std::vector<float> min_d2(static_cast<size_t>(n), std::numeric_limits<float>::infinity());
  std::vector<char> taken(static_cast<size_t>(n), 0);
  taken[static_cast<size_t>(start)] = 1;
  for (int step = 1; step < m; ++step) {
    const Vec3& last = points[static_cast<size_t>(picked.back())];
    int32_t best = -1;
    float best_d2 = -1.f;
    for (int i = 0; i < n; ++i) {
      float d2 = sq_dist(points[static_cast<size_t>(i)], last);
      if (d2 < min_d2[static_cast<size_t>(i)]) min_d2[static_cast<size_t>(i)] = d2;
      if (taken[static_cast<size_t>(i)]) continue;
      // strict > keeps the smallest index on ties
      if (min_d2[static_cast<size_t>(i)] > best_d2) {
        best_d2 = min_d2[static_cast<size_t>(i)];
        best = i;
      }
    }
    picked.push_back(best);
    taken[static_cast<size_t>(best)] = 1;
  }
  return picked;
}

}  // namespace rffs
