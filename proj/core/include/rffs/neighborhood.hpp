#pragma once

#include <cstdint>

#include "rffs/common.hpp"

namespace rffs {

/// Per-point neighbor index lists. `idx` is [center_count x k], row i holding
/// the selected neighbor indices of center i in ascending distance-rank
/// order. `dilation`/`step` record how the selection was built.
struct Neighborhood {
  enum class Mode { kPlain, kDilated, kAnnular };

  IndexMatrix idx;
  Mode mode = Mode::kPlain;
  int dilation = 1;
  int step = 0;  // sampling step (dilated mode only)

  int center_count() const { return idx.rows; }
  int k() const { return idx.cols; }
};

}  // namespace rffs
