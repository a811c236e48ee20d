#include "rffs/sparse_knn.hpp"

#include <string>

namespace rffs {

int expansion_size(int k, int delta, int r) {
  check(k >= 1, "expansion_size: k must be >= 1");
  check(delta >= 1, "expansion_size: delta must be >= 1");
  check(r >= 1, "expansion_size: dilation rate must be >= 1");
  const int group = r - 1 + delta;
  const int q = k / delta;
  const int f = k % delta;
  // ceil((f/delta) * group) in exact integer arithmetic
  const int partial = (f * group + delta - 1) / delta;
  return q * group + partial;
}

std::vector<int> sparse_rank_positions(int k, int delta, int r) {
  const int ks = expansion_size(k, delta, r);
  const int group = r - 1 + delta;
  const int q = k / delta;
  const int f = k % delta;
  std::vector<int> pos;
  pos.reserve(static_cast<size_t>(k));
  for (int g = 0; g < q; ++g)
    for (int j = 0; j < delta; ++j) pos.push_back(g * group + (r - 1) + j + 1);
  // Trailing partial group: the last f ranks of the expansion region. This
  // coincides with skipping r-1 inside the partial group whenever the
  // expansion formula allots r-1+f slots to it (always true for r <= 2 and
  // whenever delta divides k).
  for (int j = f; j > 0; --j) pos.push_back(ks - j + 1);
  return pos;
}

namespace {

Neighborhood select_ranks(const KdTree& tree, const std::vector<Vec3>& queries, int k,
                          const std::vector<int>& positions, int take_from, int take_to,
                          Neighborhood::Mode mode, int r, int delta) {
  const int region = positions.empty() ? take_to : positions.back();
  check(region <= tree.size(),
        "neighbor selection: expansion region " + std::to_string(region) +
            " exceeds point count " + std::to_string(tree.size()));
  Neighborhood nb;
  nb.mode = mode;
  nb.dilation = r;
  nb.step = delta;
  nb.idx.rows = static_cast<int>(queries.size());
  nb.idx.cols = k;
  nb.idx.v.resize(static_cast<size_t>(nb.idx.rows) * k);
  std::vector<int32_t> sorted;
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    tree.query(queries[qi], region, sorted);
    int32_t* row = nb.idx.v.data() + static_cast<int64_t>(qi) * k;
    if (!positions.empty()) {
      for (int j = 0; j < k; ++j) row[j] = sorted[static_cast<size_t>(positions[static_cast<size_t>(j)] - 1)];
    } else {
      for (int rank = take_from, j = 0; rank <= take_to; ++rank, ++j)
        row[j] = sorted[static_cast<size_t>(rank - 1)];
    }
  }
  return nb;
}

}  // namespace

Neighborhood sparse_knn(const KdTree& tree, const std::vector<Vec3>& queries, int k, int delta,
                        int r) {
  std::vector<int> positions = sparse_rank_positions(k, delta, r);
  return select_ranks(tree, queries, k, positions, 0, 0, Neighborhood::Mode::kDilated, r, delta);
}

Neighborhood sparse_knn(const std::vector<Vec3>& points, const std::vector<Vec3>& queries, int k,
                        int delta, int r) {
  KdTree tree(points);
  return sparse_knn(tree, queries, k, delta, r);
}

Neighborhood annular_knn(const KdTree& tree, const std::vector<Vec3>& queries, int k, int r) {
  check(k >= 1, "annular_knn: k must be >= 1");
  check(r >= 1, "annular_knn: dilation rate must be >= 1");
  check((r - 1) % k == 0, "annular_knn: (r-1) must be divisible by k; got r=" +
                              std::to_string(r) + ", k=" + std::to_string(k));
  const int n = (r - 1) / k + 1;
  Neighborhood nb =
      select_ranks(tree, queries, k, {}, (n - 1) * k + 1, n * k, Neighborhood::Mode::kAnnular, r, 0);
  return nb;
}

Neighborhood annular_knn(const std::vector<Vec3>& points, const std::vector<Vec3>& queries, int k,
                         int r) {
  KdTree tree(points);
  return annular_knn(tree, queries, k, r);
}

}  // namespace rffs
