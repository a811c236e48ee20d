#pragma once

#include <memory>
#include <vector>

#include "rffs/common.hpp"

namespace rffs {

/// Exact kd-tree over immutable points (build once, query many). Ordering is
/// by (squared distance, index) so distance ties resolve to the smaller
/// index, matching the brute-force definition exactly.
class KdTree {
 public:
  explicit KdTree(std::vector<Vec3> points);

  /// k nearest neighbors of q, ascending (distance, index).
  void query(const Vec3& q, int k, std::vector<int32_t>& out) const;

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;       // -1 marks a leaf
    float split = 0.f;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  int build(int begin, int end, int depth);

  std::vector<Vec3> points_;
  std::vector<int32_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// k nearest data points per query, ascending by (distance, index).
/// Exact; kd-tree accelerated.
IndexMatrix knn_search(const std::vector<Vec3>& points, const std::vector<Vec3>& queries, int k);

/// Same contract via a prebuilt tree.
IndexMatrix knn_search(const KdTree& tree, const std::vector<Vec3>& queries, int k);

}  // namespace rffs
