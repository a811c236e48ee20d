#include "rffs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rffs {

namespace {

const std::vector<std::string>& known_classes() {
  static const std::vector<std::string> k{"ground", "building", "pole", "line", "vegetation"};
  return k;
}

double class_share(const std::string& name) {
  static const std::map<std::string, double> shares{{"ground", 0.52},
                                                    {"building", 0.28},
                                                    {"pole", 0.03},
                                                    {"line", 0.05},
                                                    {"vegetation", 0.12}};
  return shares.at(name);
}

struct PoleSite {
  double x, y, top;
};

}  // namespace

ClassMap synth_class_map(const std::vector<std::string>& classes) {
  ClassMap m;
  m.names = classes;
  return m;
}

PointCloud synth_scene(const SynthSpec& spec) {
  check(spec.extent > 0, "synth_scene: extent must be positive");
  check(spec.density > 0, "synth_scene: density must be positive");
  check(!spec.classes.empty(), "synth_scene: at least one class required");
  for (const auto& c : spec.classes)
    check(std::find(known_classes().begin(), known_classes().end(), c) != known_classes().end(),
          "synth_scene: unknown class '" + c + "'");

  const double e = spec.extent;
  const int total = std::max(8, static_cast<int>(std::llround(e * e * spec.density)));

  double share_sum = 0;
  for (const auto& c : spec.classes) share_sum += class_share(c);
  std::map<std::string, int> counts;
  int assigned = 0;
  for (const auto& c : spec.classes) {
    int n = std::max(8, static_cast<int>(std::llround(total * class_share(c) / share_sum)));
    counts[c] = n;
    assigned += n;
  }
  // Ground absorbs the rounding remainder.
  if (counts.count("ground"))
    counts["ground"] = std::max(8, counts["ground"] + (total - assigned));

  auto label_of = [&](const std::string& c) {
    for (size_t i = 0; i < spec.classes.size(); ++i)
      if (spec.classes[i] == c) return static_cast<int32_t>(i);
    return int32_t{-1};
  };

  Rng rng(spec.seed, /*stream=*/0x53594e54ULL);
  PointCloud cloud;
  auto push = [&](double x, double y, double z, int32_t label) {
    auto clampc = [&](double v) { return std::min(std::max(v, 0.0), e * 0.999); };
    cloud.xyz.push_back(Vec3{static_cast<float>(clampc(x)), static_cast<float>(clampc(y)),
                             static_cast<float>(z)});
    cloud.labels.push_back(label);
  };

  // Ground: uniform plane with small height noise.
  if (counts.count("ground")) {
    const int32_t lab = label_of("ground");
    for (int i = 0; i < counts["ground"]; ++i)
      push(rng.uniform(0, e), rng.uniform(0, e), rng.normal() * 0.05, lab);
  }

  // Buildings: axis-aligned boxes; roof plus four walls.
  if (counts.count("building")) {
    const int32_t lab = label_of("building");
    const int n_b = std::max(1, static_cast<int>(e / 14));
    const int per = counts["building"] / n_b;
    for (int b = 0; b < n_b; ++b) {
      const double w = rng.uniform(6, 10), l = rng.uniform(6, 10);
      const double h = rng.uniform(5, 9);
      const double bx = rng.uniform(1, std::max(1.5, e - w - 1));
      const double by = rng.uniform(1, std::max(1.5, e - l - 1));
      const int n_pts = (b + 1 < n_b) ? per : counts["building"] - per * (n_b - 1);
      const int n_roof = n_pts * 3 / 5;
      for (int i = 0; i < n_roof; ++i)
        push(bx + rng.uniform(0, w), by + rng.uniform(0, l), h + rng.normal() * 0.03, lab);
      for (int i = n_roof; i < n_pts; ++i) {
        const double t = rng.uniform(0, 2 * (w + l));
        double x, y;
        if (t < w) { x = bx + t; y = by; }
        else if (t < w + l) { x = bx + w; y = by + (t - w); }
        else if (t < 2 * w + l) { x = bx + (t - w - l); y = by + l; }
        else { x = bx; y = by + (t - 2 * w - l); }
        push(x + rng.normal() * 0.02, y + rng.normal() * 0.02, rng.uniform(0.1, h), lab);
      }
    }
  }

  // Poles and the lines strung between their tops share site geometry so the
  // scene stays coherent when both classes are requested.
  std::vector<PoleSite> sites;
  {
    const int n_sites = std::max(3, static_cast<int>(e / 9));
    const double corridor_y = e * 0.5 + rng.uniform(-e * 0.15, e * 0.15);
    for (int i = 0; i < n_sites; ++i) {
      PoleSite s;
      s.x = e * (i + 0.5) / n_sites + rng.uniform(-0.8, 0.8);
      s.y = corridor_y + rng.uniform(-1.0, 1.0);
      s.top = rng.uniform(10.2, 11.2);
      sites.push_back(s);
    }
  }
  if (counts.count("pole")) {
    const int32_t lab = label_of("pole");
    const int n = counts["pole"];
    for (int i = 0; i < n; ++i) {
      const PoleSite& s = sites[static_cast<size_t>(i) % sites.size()];
      push(s.x + rng.normal() * 0.04, s.y + rng.normal() * 0.04, rng.uniform(0, s.top), lab);
    }
  }
  if (counts.count("line")) {
    const int32_t lab = label_of("line");
    const int n = counts["line"];
    const int spans = static_cast<int>(sites.size()) - 1;
    for (int i = 0; i < n; ++i) {
      const int s0 = i % spans;
      const PoleSite& a = sites[static_cast<size_t>(s0)];
      const PoleSite& b = sites[static_cast<size_t>(s0) + 1];
      const double t = rng.uniform(0.02, 0.98);
      // slight catenary sag between supports
      const double sag = 0.4 * std::sin(t * 3.14159265358979);
      push(a.x + t * (b.x - a.x) + rng.normal() * 0.03,
           a.y + t * (b.y - a.y) + rng.normal() * 0.03,
           a.top + t * (b.top - a.top) - sag + rng.normal() * 0.02, lab);
    }
  }

  // Vegetation: ellipsoidal blobs resting on the ground.
  if (counts.count("vegetation")) {
    const int32_t lab = label_of("vegetation");
    const int n_blobs = std::max(2, static_cast<int>(e / 7));
    const int n = counts["vegetation"];
    std::vector<std::array<double, 5>> blobs;  // cx, cy, rx, ry, rz
    for (int b = 0; b < n_blobs; ++b)
      blobs.push_back({rng.uniform(1.5, e - 1.5), rng.uniform(1.5, e - 1.5),
                       rng.uniform(1.2, 3.0), rng.uniform(1.2, 3.0), rng.uniform(1.0, 2.4)});
    for (int i = 0; i < n; ++i) {
      const auto& b = blobs[static_cast<size_t>(i) % blobs.size()];
      const double u = rng.normal() * 0.45, v = rng.normal() * 0.45, w = rng.normal() * 0.45;
      push(b[0] + u * b[2], b[1] + v * b[3], std::abs(b[4] + w * b[4]) + 0.3, lab);
    }
  }

  return cloud;
}

}  // namespace rffs
