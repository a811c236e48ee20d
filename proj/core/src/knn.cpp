#include "rffs/knn.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace rffs {

namespace {

constexpr int kLeafSize = 16;

struct Cand {
  float d2;
  int32_t idx;
  // worst-first ordering for the bounded heap
  bool operator<(const Cand& o) const { return d2 < o.d2 || (d2 == o.d2 && idx < o.idx); }
};

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  check(!points_.empty(), "KdTree: empty point set");
  order_.resize(points_.size());
  for (size_t i = 0; i < points_.size(); ++i) order_[i] = static_cast<int32_t>(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 4);
  root_ = build(0, static_cast<int>(points_.size()), 0);
}

int KdTree::build(int begin, int end, int depth) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }
  const int axis = depth % 3;
  const int mid = begin + (end - begin) / 2;
  auto key = [&](int32_t i) {
    const Vec3& p = points_[static_cast<size_t>(i)];
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int32_t a, int32_t b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
  node.axis = axis;
  node.split = key(order_[static_cast<size_t>(mid)]);
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int l = build(begin, mid, depth + 1);
  const int r = build(mid, end, depth + 1);
  nodes_[static_cast<size_t>(self)].left = l;
  nodes_[static_cast<size_t>(self)].right = r;
  return self;
}

void KdTree::query(const Vec3& q, int k, std::vector<int32_t>& out) const {
  check(k >= 1, "knn_search: k must be >= 1");
  check(k <= size(), "knn_search: k=" + std::to_string(k) + " exceeds point count " +
                         std::to_string(size()));
  // Max-heap of the current k best; top is the worst kept candidate.
  std::priority_queue<Cand> best;

  // Iterative DFS with near-side-first ordering.
  struct Frame { int node; float plane_d2; };
  std::vector<Frame> stack;
  stack.push_back({root_, 0.f});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (static_cast<int>(best.size()) == k && f.plane_d2 > best.top().d2) continue;
    const Node& n = nodes_[static_cast<size_t>(f.node)];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int32_t pi = order_[static_cast<size_t>(i)];
        Cand c{sq_dist(points_[static_cast<size_t>(pi)], q), pi};
        if (static_cast<int>(best.size()) < k) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      continue;
    }
    const float qa = n.axis == 0 ? q.x : (n.axis == 1 ? q.y : q.z);
    const float diff = qa - n.split;
    const int near = diff < 0.f ? n.left : n.right;
    const int far = diff < 0.f ? n.right : n.left;
    stack.push_back({far, diff * diff});
    stack.push_back({near, 0.f});
  }

  out.resize(static_cast<size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    out[static_cast<size_t>(i)] = best.top().idx;
    best.pop();
  }
}

IndexMatrix knn_search(const KdTree& tree, const std::vector<Vec3>& queries, int k) {
  IndexMatrix out;
  out.rows = static_cast<int>(queries.size());
  out.cols = k;
  out.v.resize(static_cast<size_t>(out.rows) * k);
  std::vector<int32_t> row;
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    tree.query(queries[qi], k, row);
    std::copy(row.begin(), row.end(), out.v.begin() + static_cast<int64_t>(qi) * k);
  }
  return out;
}

IndexMatrix knn_search(const std::vector<Vec3>& points, const std::vector<Vec3>& queries, int k) {
  KdTree tree(points);
  return knn_search(tree, queries, k);
}

}  // namespace rffs
