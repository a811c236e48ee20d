#pragma once

#include <vector>

#include "rffs/common.hpp"
#include "rffs/knn.hpp"
#include "rffs/neighborhood.hpp"

namespace rffs {

/// Smallest expansion region holding k target neighbors at sampling step
/// `delta` and dilation `r`:
///   floor(k/delta)*(r-1+delta) + ceil((k/delta - floor(k/delta))*(r-1+delta))
int expansion_size(int k, int delta, int r);

/// Sorted-rank positions (1-based, ascending) kept by the sparse selection:
/// each complete group of (r-1+delta) ranks contributes its last `delta`
/// (the first r-1 are skipped); a trailing partial group contributes its
/// last k mod delta ranks. Exactly k positions, max position ==
/// expansion_size(k, delta, r).
std::vector<int> sparse_rank_positions(int k, int delta, int r);

/// Dilated neighbor selection: per query, the expansion_size nearest points
/// (ascending distance, ties by index) filtered to sparse_rank_positions.
Neighborhood sparse_knn(const std::vector<Vec3>& points, const std::vector<Vec3>& queries, int k,
                        int delta, int r);
Neighborhood sparse_knn(const KdTree& tree, const std::vector<Vec3>& queries, int k, int delta,
                        int r);

/// Annular selection: ring n = (r-1)/k + 1 of the sorted neighbor list, i.e.
/// ranks (n-1)k+1 .. nk. Requires (r-1) divisible by k; other rates are
/// rejected rather than rounded.
Neighborhood annular_knn(const std::vector<Vec3>& points, const std::vector<Vec3>& queries, int k,
                         int r);
Neighborhood annular_knn(const KdTree& tree, const std::vector<Vec3>& queries, int k, int r);

}  // namespace rffs
