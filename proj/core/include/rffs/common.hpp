#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rffs {

/// 3D point in meters. Geometry is kept in f32 throughout; learnable state
/// may be wider (see TensorT).
struct Vec3 {
  float x = 0.f, y = 0.f, z = 0.f;

  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  float sq_norm() const { return x * x + y * y + z * z; }
};

inline float sq_dist(const Vec3& a, const Vec3& b) { return (a - b).sq_norm(); }

/// Row-major integer index matrix; cols == 0 encodes a flat index vector.
struct IndexMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int32_t> v;

  int32_t at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  int32_t& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  bool empty() const { return v.empty(); }
};

/// Deterministic, platform-independent RNG (splitmix64 core). std:: engines
/// are seed-stable but the distributions are not specified bit-exactly, so
/// sampling helpers are hand-rolled.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : state_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, n). Modulo with rejection to avoid bias.
  uint32_t below(uint32_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    uint64_t threshold = (~uint64_t{0} - n + 1) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return static_cast<uint32_t>(r % n);
    }
  }

  /// Uniform double in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Box-Muller; one value per call, cache discarded for simplicity.
  double normal() {
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  float uniformf(float lo, float hi) { return static_cast<float>(uniform(lo, hi)); }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27; z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }
  uint64_t state_;
};

/// Stable hash combiner for deriving per-(block, epoch, ...) substream seeds.
inline uint64_t seed_mix(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 1);
  z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27; z *= 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace rffs
