#include <benchmark/benchmark.h>

#include "rffs/common.hpp"
#include "rffs/fps.hpp"
#include "rffs/hierarchy.hpp"
#include "rffs/knn.hpp"
#include "rffs/sparse_knn.hpp"

namespace {

std::vector<rffs::Vec3> cloud(int n, float extent = 30.f) {
  rffs::Rng rng(12345);
  std::vector<rffs::Vec3> pts(static_cast<size_t>(n));
  for (auto& p : pts) {
    p.x = rng.uniformf(0, extent);
    p.y = rng.uniformf(0, extent);
    p.z = rng.uniformf(0, 12.f);
  }
  return pts;
}

void BM_KdTreeBuild(benchmark::State& state) {
  auto pts = cloud(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    rffs::KdTree tree(pts);
    benchmark::DoNotOptimize(tree.size());
  }
}
BENCHMARK(BM_KdTreeBuild)->Arg(1024)->Arg(4096);

void BM_KnnSearch(benchmark::State& state) {
  auto pts = cloud(static_cast<int>(state.range(0)));
  rffs::KdTree tree(pts);
  for (auto _ : state) {
    auto idx = rffs::knn_search(tree, pts, 32);
    benchmark::DoNotOptimize(idx.v.data());
  }
}
BENCHMARK(BM_KnnSearch)->Arg(1024)->Arg(4096);

void BM_SparseKnn(benchmark::State& state) {
  auto pts = cloud(128, 8.f);
  rffs::KdTree tree(pts);
  for (auto _ : state) {
    auto nb = rffs::sparse_knn(tree, pts, 32, 4, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(nb.idx.v.data());
  }
}
BENCHMARK(BM_SparseKnn)->Arg(1)->Arg(8);

void BM_Fps(benchmark::State& state) {
  auto pts = cloud(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto idx = rffs::farthest_point_sampling(pts, static_cast<int>(state.range(0)) / 4, 0);
    benchmark::DoNotOptimize(idx.data());
  }
}
BENCHMARK(BM_Fps)->Arg(1024)->Arg(4096);

void BM_BuildHierarchy(benchmark::State& state) {
  auto pts = cloud(4096);
  std::vector<int32_t> labels(4096, 0);
  for (auto _ : state) {
    auto h = rffs::build_hierarchy(pts, labels, 32);
    benchmark::DoNotOptimize(h.level(3).size());
  }
}
BENCHMARK(BM_BuildHierarchy);

}  // namespace

BENCHMARK_MAIN();
