#include "rffs/model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rffs {

namespace {

using nlohmann::json;

const char* agg_name(BranchAggregation a) {
  return a == BranchAggregation::kConcat ? "concat" : "add";
}

BranchAggregation agg_from_name(const std::string& s) {
  if (s == "concat") return BranchAggregation::kConcat;
  if (s == "add") return BranchAggregation::kAdd;
  throw std::invalid_argument("arch: aggregation must be 'concat' or 'add', got '" + s + "'");
}

}  // namespace

std::string arch_to_json(const ArchConfig& cfg) {
  json j;
  j["input_channels"] = cfg.input_channels;
  j["classes"] = cfg.classes;
  j["encoder_channels"] = cfg.encoder_channels;
  j["branch_channels"] = cfg.branch_channels;
  j["fused_channels"] = cfg.fused_channels;
  j["decoder_channels"] = cfg.decoder_channels;
  j["dilations"] = cfg.dilations;
  j["delta"] = cfg.delta;
  j["k"] = cfg.k;
  j["level_ratios"] = cfg.level_ratios;
  j["dense_connections"] = cfg.dense_connections;
  j["aggregation"] = agg_name(cfg.aggregation);
  return j.dump();
}

ArchConfig arch_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("arch: invalid JSON: ") + e.what());
  }
  ArchConfig cfg;
  static const std::vector<std::string> known{
      "input_channels", "classes",        "encoder_channels", "branch_channels",
      "fused_channels", "decoder_channels", "dilations",      "delta",
      "k",              "level_ratios",   "dense_connections", "aggregation"};
  for (auto it = j.begin(); it != j.end(); ++it)
    check(std::find(known.begin(), known.end(), it.key()) != known.end(),
          "arch: unknown key '" + it.key() + "'");
  if (j.contains("input_channels")) cfg.input_channels = j["input_channels"].get<int>();
  if (j.contains("classes")) cfg.classes = j["classes"].get<int>();
  if (j.contains("encoder_channels"))
    cfg.encoder_channels = j["encoder_channels"].get<std::array<int, 3>>();
  if (j.contains("branch_channels")) cfg.branch_channels = j["branch_channels"].get<int>();
  if (j.contains("fused_channels")) cfg.fused_channels = j["fused_channels"].get<int>();
  if (j.contains("decoder_channels"))
    cfg.decoder_channels = j["decoder_channels"].get<std::array<int, 3>>();
  if (j.contains("dilations")) cfg.dilations = j["dilations"].get<std::vector<int>>();
  if (j.contains("delta")) cfg.delta = j["delta"].get<int>();
  if (j.contains("k")) cfg.k = j["k"].get<int>();
  if (j.contains("level_ratios")) cfg.level_ratios = j["level_ratios"].get<std::array<int, 3>>();
  if (j.contains("dense_connections")) cfg.dense_connections = j["dense_connections"].get<bool>();
  if (j.contains("aggregation")) cfg.aggregation = agg_from_name(j["aggregation"].get<std::string>());
  cfg.validate();
  return cfg;
}

ArchConfig load_arch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("arch: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return arch_from_json(ss.str());
}

BlockData prepare_block_data(const ArchConfig& cfg, const std::vector<Vec3>& normalized_xyz,
                             const std::vector<float>& attrs, int attr_dim,
                             const std::vector<int32_t>& labels, uint64_t seed) {
  cfg.validate();
  const int n = static_cast<int>(normalized_xyz.size());
  check(cfg.input_channels == 3 + attr_dim,
        "prepare_block_data: architecture expects " + std::to_string(cfg.input_channels) +
            " input channels but data provides " + std::to_string(3 + attr_dim));
  const int min_n = min_input_points(cfg);
  check(n >= min_n, "prepare_block_data: block has " + std::to_string(n) +
                        " points; configured graphs need at least " + std::to_string(min_n) +
                        " (level-3 set must hold " + std::to_string(min_level3_points(cfg)) +
                        " points for k=" + std::to_string(cfg.k) + ", delta=" +
                        std::to_string(cfg.delta) + ", max dilation)");

  BlockData block;
  block.hier = build_hierarchy(normalized_xyz, labels, cfg.k, cfg.level_ratios, seed);
  for (int l = 1; l <= 3; ++l)
    block.relpos[static_cast<size_t>(l - 1)] = mapping_relpos(block.hier, l);
  for (int l = 0; l < 3; ++l)
    block.up[static_cast<size_t>(l)] =
        make_interp_plan(block.hier.level(l + 1).xyz, block.hier.level(l).xyz);

  const auto& bottom = block.hier.level(3).xyz;
  KdTree tree(bottom);
  for (size_t i = 0; i < cfg.dilations.size(); ++i) {
    block.dag_dilated.push_back(
        sparse_knn(tree, bottom, cfg.k, cfg.delta, cfg.dilations[i]));
    // ring m for the m-th cascade layer; Eq. 4 admits exactly these rates
    block.dag_annular.push_back(
        annular_knn(tree, bottom, cfg.k, static_cast<int>(i) * cfg.k + 1));
  }

  block.features = TensorT<float>({n, cfg.input_channels});
  for (int i = 0; i < n; ++i) {
    float* row = block.features.data.data() + static_cast<int64_t>(i) * cfg.input_channels;
    row[0] = normalized_xyz[static_cast<size_t>(i)].x;
    row[1] = normalized_xyz[static_cast<size_t>(i)].y;
    row[2] = normalized_xyz[static_cast<size_t>(i)].z;
    for (int a = 0; a < attr_dim; ++a)
      row[3 + a] = attrs[static_cast<size_t>(i) * attr_dim + a];
  }
  return block;
}

}  // namespace rffs
