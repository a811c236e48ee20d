#include "rffs/pointcloud.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rffs {

ClassMap ClassMap::generic(int c) {
  ClassMap m;
  for (int i = 0; i < c; ++i) m.names.push_back("class" + std::to_string(i));
  return m;
}

void ClassMap::validate() const {
  check(count() >= 2, "ClassMap: needs at least 2 classes");
  std::set<std::string> seen(names.begin(), names.end());
  check(static_cast<int>(seen.size()) == count(), "ClassMap: class names must be unique");
}

ColumnSchema ColumnSchema::parse(const std::string& spec) {
  ColumnSchema s;
  std::string token;
  for (char ch : spec + " ") {
    if (ch == ' ' || ch == ',' || ch == '\t') {
      if (!token.empty()) s.columns.push_back(token);
      token.clear();
    } else {
      token += ch;
    }
  }
  check(!s.columns.empty(), "ColumnSchema: empty column spec");
  return s;
}

std::string ColumnSchema::to_string() const {
  std::string out;
  for (size_t i = 0; i < columns.size(); ++i) out += (i ? " " : "") + columns[i];
  return out;
}

namespace {

bool parse_float(const std::string& tok, float& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

bool parse_label(const std::string& tok, int32_t& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

PointCloud parse_points(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_points: cannot open " + path);

  ColumnSchema cols = schema;
  std::string line;
  int line_no = 0;

  // Optional header line overrides the supplied schema.
  std::streampos after_header = in.tellg();
  if (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("#cols:", 0) == 0) {
      cols = ColumnSchema::parse(line.substr(6));
    } else {
      in.seekg(after_header);
      line_no = 0;
    }
  }

  int xi = -1, yi = -1, zi = -1, li = -1;
  std::vector<int> attr_cols;
  for (int i = 0; i < static_cast<int>(cols.columns.size()); ++i) {
    const std::string& c = cols.columns[static_cast<size_t>(i)];
    if (c == "x") xi = i;
    else if (c == "y") yi = i;
    else if (c == "z") zi = i;
    else if (c == "label") li = i;
    else attr_cols.push_back(i);
  }
  check(xi >= 0 && yi >= 0 && zi >= 0,
        "parse_points: schema must contain x, y, z (got '" + cols.to_string() + "')");

  PointCloud cloud;
  cloud.attr_dim = static_cast<int>(attr_cols.size());
  const int want = static_cast<int>(cols.columns.size());
  std::vector<std::string> toks;
  toks.reserve(static_cast<size_t>(want));

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    toks.clear();
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (static_cast<int>(toks.size()) != want)
      throw std::runtime_error("parse_points: line " + std::to_string(line_no) + ": expected " +
                               std::to_string(want) + " columns, got " +
                               std::to_string(toks.size()));
    Vec3 p;
    if (!parse_float(toks[static_cast<size_t>(xi)], p.x) ||
        !parse_float(toks[static_cast<size_t>(yi)], p.y) ||
        !parse_float(toks[static_cast<size_t>(zi)], p.z) ||
        !std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw std::runtime_error("parse_points: line " + std::to_string(line_no) +
                               ": malformed coordinate");
    cloud.xyz.push_back(p);
    for (int ac : attr_cols) {
      float v;
      if (!parse_float(toks[static_cast<size_t>(ac)], v))
        throw std::runtime_error("parse_points: line " + std::to_string(line_no) +
                                 ": malformed value in column '" +
                                 cols.columns[static_cast<size_t>(ac)] + "'");
      cloud.attrs.push_back(v);
    }
    if (li >= 0) {
      int32_t lab;
      if (!parse_label(toks[static_cast<size_t>(li)], lab))
        throw std::runtime_error("parse_points: line " + std::to_string(line_no) +
                                 ": unknown label id '" + toks[static_cast<size_t>(li)] + "'");
      cloud.labels.push_back(lab);
    }
  }
  check(cloud.size() >= 1, "parse_points: no points in " + path);
  return cloud;
}

namespace {

// %.9g round-trips f32 exactly.
void append_float(std::string& out, float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  out += buf;
}

}  // namespace

void write_predictions(const PointCloud& cloud, const std::vector<int32_t>& predicted,
                       const std::string& path) {
  check(static_cast<int>(predicted.size()) == cloud.size(),
        "write_predictions: prediction count " + std::to_string(predicted.size()) +
            " does not match point count " + std::to_string(cloud.size()));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_predictions: cannot open " + path);
  std::string buf;
  for (int i = 0; i < cloud.size(); ++i) {
    buf.clear();
    const Vec3& p = cloud.xyz[static_cast<size_t>(i)];
    append_float(buf, p.x); buf += ' ';
    append_float(buf, p.y); buf += ' ';
    append_float(buf, p.z); buf += ' ';
    buf += std::to_string(cloud.has_labels() ? cloud.labels[static_cast<size_t>(i)] : -1);
    buf += ' ';
    buf += std::to_string(predicted[static_cast<size_t>(i)]);
    buf += '\n';
    out << buf;
  }
  if (!out) throw std::runtime_error("write_predictions: write failed for " + path);
}

void write_points(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_points: cannot open " + path);
  std::string header = "#cols: x y z";
  for (int a = 0; a < cloud.attr_dim; ++a) header += " a" + std::to_string(a);
  if (cloud.has_labels()) header += " label";
  out << header << '\n';
  std::string buf;
  for (int i = 0; i < cloud.size(); ++i) {
    buf.clear();
    const Vec3& p = cloud.xyz[static_cast<size_t>(i)];
    append_float(buf, p.x); buf += ' ';
    append_float(buf, p.y); buf += ' ';
    append_float(buf, p.z);
    for (int a = 0; a < cloud.attr_dim; ++a) {
      buf += ' ';
      append_float(buf, cloud.attrs[static_cast<size_t>(i) * cloud.attr_dim + a]);
    }
    if (cloud.has_labels()) {
      buf += ' ';
      buf += std::to_string(cloud.labels[static_cast<size_t>(i)]);
    }
    buf += '\n';
    out << buf;
  }
  if (!out) throw std::runtime_error("write_points: write failed for " + path);
}

}  // namespace rffs
