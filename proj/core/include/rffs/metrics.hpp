#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/pointcloud.hpp"

namespace rffs {

/// C x C integer counts; rows are true classes, columns predicted.
struct ConfusionMatrix {
  int classes = 0;
  std::vector<uint64_t> counts;

  explicit ConfusionMatrix(int c = 0) : classes(c), counts(static_cast<size_t>(c) * c, 0) {}

  uint64_t& at(int t, int p) { return counts[static_cast<size_t>(t) * classes + p]; }
  uint64_t at(int t, int p) const { return counts[static_cast<size_t>(t) * classes + p]; }
  uint64_t total() const {
    uint64_t s = 0;
    for (uint64_t v : counts) s += v;
    return s;
  }
  void merge(const ConfusionMatrix& o) {
    check(o.classes == classes, "ConfusionMatrix::merge: class count mismatch");
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
  }
};

struct ClassScore {
  std::string name;
  double precision = 0, recall = 0, f1 = 0, iou = 0;
  bool absent = false;  // TP+FP+FN == 0; scores forced to 0
};

struct MetricsReport {
  std::vector<ClassScore> per_class;
  double oa = 0, mf1 = 0, miou = 0;
};

ConfusionMatrix confusion(const std::vector<int32_t>& truth, const std::vector<int32_t>& pred,
                          int classes);

/// precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2pr/(p+r),
/// IoU = TP/(TP+FP+FN); zero denominators score 0 (absent classes flagged).
/// Means run over all classes including absent ones.
MetricsReport per_class_metrics(const ConfusionMatrix& cm, const ClassMap& classes);
MetricsReport per_class_metrics(const ConfusionMatrix& cm);

enum class ReportFormat { kJson, kCsv };
void export_report(const MetricsReport& report, const std::string& path, ReportFormat format);

/// Confusion counts as CSV with a header row of class names.
void export_confusion_csv(const ConfusionMatrix& cm, const ClassMap& classes,
                          const std::string& path);

}  // namespace rffs
