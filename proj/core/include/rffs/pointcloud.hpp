#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rffs/common.hpp"

namespace rffs {

/// Labeled point set. Attributes are row-major [N x attr_dim]; labels use -1
/// for "unlabeled". Coordinates are meters.
struct PointCloud {
  std::vector<Vec3> xyz;
  std::vector<float> attrs;
  int attr_dim = 0;
  std::vector<int32_t> labels;

  int size() const { return static_cast<int>(xyz.size()); }
  bool has_labels() const { return !labels.empty(); }
  /// True when every point carries a non-negative label.
  bool fully_labeled() const {
    if (labels.empty()) return false;
    for (int32_t l : labels)
      if (l < 0) return false;
    return true;
  }
};

/// Ordered class names; index is the class id.
struct ClassMap {
  std::vector<std::string> names;

  int count() const { return static_cast<int>(names.size()); }
  static ClassMap generic(int c);
  void validate() const;
};

/// Column layout of an ASCII point file. Recognized names: x, y, z, label;
/// anything else is stored as a float attribute column in order.
struct ColumnSchema {
  std::vector<std::string> columns;

  static ColumnSchema parse(const std::string& spec);  // whitespace/comma separated
  std::string to_string() const;
};

/// Reads whitespace-separated decimal columns. A leading "#cols: ..." header
/// line overrides `schema`. Reports malformed lines by number.
PointCloud parse_points(const std::string& path, const ColumnSchema& schema);

/// Writes "x y z true_label pred_label" lines (true_label -1 when absent).
void write_predictions(const PointCloud& cloud, const std::vector<int32_t>& predicted,
                       const std::string& path);

/// Writes a labeled cloud with a "#cols:" header for round-tripping.
void write_points(const PointCloud& cloud, const std::string& path);

}  // namespace rffs
