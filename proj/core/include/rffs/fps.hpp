#pragma once

#include <cstdint>
#include <vector>

#include "rffs/common.hpp"

namespace rffs {

/// Farthest point sampling: greedy max-min selection of m indices. Seed 0
/// starts at index 0; any other seed draws a uniform random start. Distance
/// ties resolve to the smaller index.
std::vector<int32_t> farthest_point_sampling(const std::vector<Vec3>& points, int m,
                                             uint64_t seed = 0);

}  // namespace rffs
