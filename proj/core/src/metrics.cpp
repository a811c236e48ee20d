#include "rffs/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace rffs {

ConfusionMatrix confusion(const std::vector<int32_t>& truth, const std::vector<int32_t>& pred,
                          int classes) {
  check(classes >= 2, "confusion: needs at least 2 classes");
  check(!truth.empty(), "confusion: empty input");
  check(truth.size() == pred.size(), "confusion: label count mismatch (" +
                                         std::to_string(truth.size()) + " true vs " +
                                         std::to_string(pred.size()) + " predicted)");
  ConfusionMatrix cm(classes);
  for (size_t i = 0; i < truth.size(); ++i) {
    const int32_t t = truth[i], p = pred[i];
    check(t >= 0 && t < classes, "confusion: true label " + std::to_string(t) + " out of range");
    check(p >= 0 && p < classes,
          "confusion: predicted label " + std::to_string(p) + " out of range");
    ++cm.at(t, p);
  }
  return cm;
}

MetricsReport per_class_metrics(const ConfusionMatrix& cm, const ClassMap& classes) {
  check(cm.classes == classes.count(), "per_class_metrics: class map size mismatch");
  MetricsReport rep;
  const double total = static_cast<double>(cm.total());
  uint64_t trace = 0;
  for (int c = 0; c < cm.classes; ++c) {
    const uint64_t tp = cm.at(c, c);
    uint64_t fp = 0, fn = 0;
    for (int o = 0; o < cm.classes; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
    trace += tp;
    ClassScore s;
    s.name = classes.names[static_cast<size_t>(c)];
    if (tp + fp + fn == 0) {
      s.absent = true;
    } else {
      s.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
      s.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
      s.f1 = s.precision + s.recall > 0
                 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                 : 0.0;
      s.iou = static_cast<double>(tp) / (tp + fp + fn);
    }
    rep.mf1 += s.f1;
    rep.miou += s.iou;
    rep.per_class.push_back(std::move(s));
  }
  rep.mf1 /= cm.classes;
  rep.miou /= cm.classes;
  rep.oa = total > 0 ? trace / total : 0.0;
  return rep;
}

MetricsReport per_class_metrics(const ConfusionMatrix& cm) {
  return per_class_metrics(cm, ClassMap::generic(cm.classes));
}

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void export_report(const MetricsReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_report: cannot open " + path);
  if (format == ReportFormat::kJson) {
    nlohmann::json j;
    j["classes"] = nlohmann::json::array();
    for (const auto& s : report.per_class)
      j["classes"].push_back({{"name", s.name},
                              {"precision", s.precision},
                              {"recall", s.recall},
                              {"f1", s.f1},
                              {"iou", s.iou},
                              {"absent", s.absent}});
    j["oa"] = report.oa;
    j["mf1"] = report.mf1;
    j["miou"] = report.miou;
    out << j.dump(2) << '\n';
  } else {
    out << "class,precision,recall,f1,iou,absent\n";
    for (const auto& s : report.per_class)
      out << s.name << ',' << fmt9(s.precision) << ',' << fmt9(s.recall) << ',' << fmt9(s.f1)
          << ',' << fmt9(s.iou) << ',' << (s.absent ? 1 : 0) << '\n';
    // Aggregate row: overall accuracy in the precision column, means in their
    // own columns.
    out << "overall," << fmt9(report.oa) << ",," << fmt9(report.mf1) << ',' << fmt9(report.miou)
        << ",\n";
  }
  if (!out) throw std::runtime_error("export_report: write failed for " + path);
}

void export_confusion_csv(const ConfusionMatrix& cm, const ClassMap& classes,
                          const std::string& path) {
  check(cm.classes == classes.count(), "export_confusion_csv: class map size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_confusion_csv: cannot open " + path);
  out << "true\\pred";
  for (const auto& n : classes.names) out << ',' << n;
  out << '\n';
  for (int t = 0; t < cm.classes; ++t) {
    out << classes.names[static_cast<size_t>(t)];
    for (int p = 0; p < cm.classes; ++p) out << ',' << cm.at(t, p);
    out << '\n';
  }
  if (!out) throw std::runtime_error("export_confusion_csv: write failed for " + path);
}

}  // namespace rffs
