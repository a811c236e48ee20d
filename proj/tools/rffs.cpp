// rffs: point-cloud classification pipeline driver.
//
// Subcommands: synth, blocks, graphs, train, predict, eval. Every command is
// deterministic given its inputs and seed; RFFS_SEED serves as a fallback
// seed when --seed is not passed.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rffs/blocks.hpp"
#include "rffs/checkpoint.hpp"
#include "rffs/metrics.hpp"
#include "rffs/model.hpp"
#include "rffs/pointcloud.hpp"
#include "rffs/synth.hpp"
#include "rffs/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t env_seed_fallback() {
  if (const char* s = std::getenv("RFFS_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      throw std::invalid_argument("RFFS_SEED is not a valid integer: " + std::string(s));
    }
  }
  return 0;
}

std::vector<int> parse_int_list(const std::string& s, const char* flag) {
  std::vector<int> out;
  std::string tok;
  for (char ch : s + ",") {
    if (ch == ',' || ch == ' ') {
      if (!tok.empty()) {
        try {
          out.push_back(std::stoi(tok));
        } catch (...) {
          throw std::invalid_argument(std::string(flag) + ": invalid integer '" + tok + "'");
        }
        tok.clear();
      }
    } else {
      tok += ch;
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(flag) + ": empty list");
  return out;
}

std::vector<float> parse_float_list(const std::string& s, const char* flag) {
  std::vector<float> out;
  std::string tok;
  for (char ch : s + ",") {
    if (ch == ',' || ch == ' ') {
      if (!tok.empty()) {
        try {
          out.push_back(std::stof(tok));
        } catch (...) {
          throw std::invalid_argument(std::string(flag) + ": invalid number '" + tok + "'");
        }
        tok.clear();
      }
    } else {
      tok += ch;
    }
  }
  return out;
}

std::vector<std::string> parse_name_list(const std::string& s) {
  std::vector<std::string> out;
  std::string tok;
  for (char ch : s + ",") {
    if (ch == ',' || ch == ' ') {
      if (!tok.empty()) out.push_back(tok);
      tok.clear();
    } else {
      tok += ch;
    }
  }
  return out;
}

/// Block files of a dataset directory in deterministic (ascending name)
/// order; a plain file is a single block.
std::vector<fs::path> dataset_files(const std::string& path) {
  fs::path p(path);
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      if (ext == ".txt" || ext == ".pts" || ext == ".xyz") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw std::runtime_error("no .txt/.pts/.xyz point files found in " + path);
    return files;
  }
  if (fs::is_regular_file(p)) return {p};
  throw std::runtime_error("dataset path does not exist: " + path);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out, const std::string& classes, double extent, double density,
              uint64_t seed) {
  rffs::SynthSpec spec;
  spec.classes = parse_name_list(classes);
  spec.extent = extent;
  spec.density = density;
  spec.seed = seed;
  rffs::PointCloud cloud = rffs::synth_scene(spec);
  rffs::write_points(cloud, out);
  std::cout << "wrote " << cloud.size() << " points (" << spec.classes.size() << " classes) to "
            << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// blocks
// ---------------------------------------------------------------------------

int cmd_blocks(const std::string& input, const std::string& schema, double block_size,
               int min_count, const std::string& out_dir) {
  rffs::PointCloud cloud = rffs::parse_points(input, rffs::ColumnSchema::parse(schema));
  std::vector<rffs::Block> blocks = rffs::partition_blocks(cloud, block_size, min_count);

  fs::create_directories(out_dir);
  json manifest;
  manifest["source"] = fs::path(input).filename().string();
  manifest["block_size"] = block_size;
  manifest["min_count"] = min_count;
  manifest["total_points"] = cloud.size();
  manifest["blocks"] = json::array();
  for (size_t i = 0; i < blocks.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "block_%04zu.txt", i);
    rffs::PointCloud sub = rffs::extract_points(cloud, blocks[i].point_indices);
    rffs::write_points(sub, (fs::path(out_dir) / name).string());
    manifest["blocks"].push_back({{"id", i},
                                  {"file", name},
                                  {"origin", blocks[i].origin},
                                  {"extent", blocks[i].extent},
                                  {"count", blocks[i].count()}});
  }
  std::ofstream mf(fs::path(out_dir) / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write manifest in " + out_dir);
  mf << manifest.dump(2) << '\n';
  std::cout << "wrote " << blocks.size() << " blocks + manifest.json to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// graphs
// ---------------------------------------------------------------------------

json neighborhood_to_json(const rffs::Neighborhood& nb) {
  json rows = json::array();
  for (int i = 0; i < nb.idx.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < nb.idx.cols; ++j) row.push_back(nb.idx.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_graphs(const std::string& input, const std::string& schema, int k, int delta,
               const std::string& dilations, const std::string& out, uint64_t seed) {
  rffs::PointCloud cloud = rffs::parse_points(input, rffs::ColumnSchema::parse(schema));
  rffs::ArchConfig arch;
  arch.k = k;
  arch.delta = delta;
  arch.dilations = parse_int_list(dilations, "--dilations");
  arch.input_channels = 3 + cloud.attr_dim;
  rffs::BlockData block = rffs::prepare_cloud(arch, cloud, seed);

  json dump;
  dump["k"] = k;
  dump["delta"] = delta;
  dump["dilations"] = arch.dilations;
  dump["levels"] = json::array();
  for (int l = 0; l <= 3; ++l) {
    const auto& lev = block.hier.level(l);
    json jl;
    jl["level"] = l;
    jl["size"] = lev.size();
    if (l > 0) {
      jl["fps_indices"] = lev.fps_indices;
      jl["point_graph"] = neighborhood_to_json(lev.point_graph);
      jl["mapping_graph"] = neighborhood_to_json(lev.mapping);
    }
    dump["levels"].push_back(std::move(jl));
  }
  dump["dagfusion"] = json::object();
  dump["dagfusion"]["dilated"] = json::array();
  dump["dagfusion"]["annular"] = json::array();
  for (size_t i = 0; i < block.dag_dilated.size(); ++i) {
    dump["dagfusion"]["dilated"].push_back(
        {{"r", block.dag_dilated[i].dilation},
         {"delta", block.dag_dilated[i].step},
         {"indices", neighborhood_to_json(block.dag_dilated[i])}});
    dump["dagfusion"]["annular"].push_back(
        {{"ring", static_cast<int>(i) + 1},
         {"r", block.dag_annular[i].dilation},
         {"indices", neighborhood_to_json(block.dag_annular[i])}});
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << dump.dump() << '\n';
  std::cout << "wrote hierarchy + graph dump (" << block.hier.level(0).size() << "/"
            << block.hier.level(1).size() << "/" << block.hier.level(2).size() << "/"
            << block.hier.level(3).size() << " points) to " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
  std::string config_path;
  std::string data;
  std::string schema = "x y z label";
  std::string out_checkpoint = "rffs.ckpt";
  std::string metrics_log = "metrics.jsonl";
  std::string resume;
  uint64_t seed = 0;
  int epochs = 500;
  int batch_size = 16;
  float lr = 0.002f;
  float weight_decay = 0.01f;
  int points_per_block = 4096;
  std::string loss_reduction = "mean";
  std::string loss_weights;
  std::string loss_preset;
  std::string dilations;
  std::string aggregation;
  bool no_dense = false;
  bool no_mrfa = false;
};

/// Merges the optional JSON config with command-line flags (flags win).
/// Unknown JSON keys are rejected.
void merge_train_config(const TrainOptions& opt, const std::set<std::string>& flags_given,
                        rffs::TrainConfig& cfg, rffs::ArchConfig& arch, std::string& data,
                        std::string& out_checkpoint, std::string& metrics_log,
                        int& points_per_block) {
  json j;
  if (!opt.config_path.empty()) {
    std::ifstream f(opt.config_path);
    if (!f) throw std::runtime_error("cannot open config " + opt.config_path);
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: invalid JSON: " + std::string(e.what()));
    }
    static const std::vector<std::string> known{
        "epochs",     "batch_size",   "lr",          "weight_decay",     "seed",
        "loss_weights", "loss_reduction", "points_per_block", "arch",   "data",
        "out_checkpoint", "metrics_log"};
    for (auto it = j.begin(); it != j.end(); ++it)
      rffs::check(std::find(known.begin(), known.end(), it.key()) != known.end(),
                  "config: unknown key '" + it.key() + "'");
  }

  if (j.contains("arch")) arch = rffs::arch_from_json(j["arch"].dump());
  auto pick_int = [&](const char* key, int flag_val, int def) {
    if (flags_given.count(key)) return flag_val;
    if (j.contains(key)) return j[key].get<int>();
    return def;
  };
  auto pick_float = [&](const char* key, float flag_val, float def) {
    if (flags_given.count(key)) return flag_val;
    if (j.contains(key)) return j[key].get<float>();
    return def;
  };

  cfg.epochs = pick_int("epochs", opt.epochs, 500);
  cfg.batch_size = pick_int("batch_size", opt.batch_size, 16);
  cfg.adam.lr = pick_float("lr", opt.lr, 0.002f);
  cfg.adam.weight_decay = pick_float("weight_decay", opt.weight_decay, 0.01f);
  if (flags_given.count("seed")) cfg.seed = opt.seed;
  else if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  else cfg.seed = env_seed_fallback();
  points_per_block = pick_int("points_per_block", opt.points_per_block, 4096);

  std::string reduction = opt.loss_reduction;
  if (!flags_given.count("loss_reduction") && j.contains("loss_reduction"))
    reduction = j["loss_reduction"].get<std::string>();
  if (reduction == "mean") cfg.reduction = rffs::LossReduction::kMean;
  else if (reduction == "sum") cfg.reduction = rffs::LossReduction::kSum;
  else throw std::invalid_argument("--loss-reduction must be 'mean' or 'sum'");

  if (j.contains("loss_weights")) {
    auto w = j["loss_weights"].get<std::vector<float>>();
    rffs::check(w.size() == 4, "config: loss_weights expects exactly 4 values, got " +
                                   std::to_string(w.size()));
    std::copy(w.begin(), w.end(), cfg.weights.lambda.begin());
  }
  if (!opt.loss_preset.empty()) {
    if (opt.loss_preset == "isprs") cfg.weights.lambda = {1.0f, 0.3f, 0.3f, 0.3f};
    else if (opt.loss_preset == "lasdu" || opt.loss_preset == "dfc2019")
      cfg.weights.lambda = {1.0f, 1.5f, 1.5f, 1.5f};
    else throw std::invalid_argument("--loss-preset must be one of: isprs, lasdu, dfc2019");
  }
  if (!opt.loss_weights.empty()) {
    auto w = parse_float_list(opt.loss_weights, "--loss-weights");
    rffs::check(w.size() == 4, "--loss-weights expects exactly 4 comma-separated values, got " +
                                   std::to_string(w.size()));
    std::copy(w.begin(), w.end(), cfg.weights.lambda.begin());
  }
  if (opt.no_mrfa) cfg.weights.lambda = {1.0f, 0.0f, 0.0f, 0.0f};

  if (!opt.dilations.empty()) arch.dilations = parse_int_list(opt.dilations, "--dilations");
  if (!opt.aggregation.empty()) {
    if (opt.aggregation == "concat") arch.aggregation = rffs::BranchAggregation::kConcat;
    else if (opt.aggregation == "add") arch.aggregation = rffs::BranchAggregation::kAdd;
    else throw std::invalid_argument("--aggregation must be 'concat' or 'add'");
  }
  if (opt.no_dense) arch.dense_connections = false;

  data = flags_given.count("data") || !opt.data.empty()
             ? opt.data
             : (j.contains("data") ? j["data"].get<std::string>() : "");
  rffs::check(!data.empty(), "train: --data (file or directory) is required");
  out_checkpoint = flags_given.count("out_checkpoint")
                       ? opt.out_checkpoint
                       : (j.contains("out_checkpoint") ? j["out_checkpoint"].get<std::string>()
                                                       : opt.out_checkpoint);
  metrics_log = flags_given.count("metrics_log")
                    ? opt.metrics_log
                    : (j.contains("metrics_log") ? j["metrics_log"].get<std::string>()
                                                 : opt.metrics_log);
}

int cmd_train(const TrainOptions& opt, const std::set<std::string>& flags_given) {
  rffs::TrainConfig cfg;
  rffs::ArchConfig arch;
  std::string data, out_checkpoint, metrics_log;
  int points_per_block = 4096;
  merge_train_config(opt, flags_given, cfg, arch, data, out_checkpoint, metrics_log,
                     points_per_block);

  // Load blocks, sample each to the configured size, validate labels.
  const auto files = dataset_files(data);
  std::vector<rffs::PointCloud> clouds;
  int attr_dim = -1;
  int32_t max_label = -1;
  for (const auto& f : files) {
    rffs::PointCloud c = rffs::parse_points(f.string(), rffs::ColumnSchema::parse(opt.schema));
    if (!c.fully_labeled())
      throw std::runtime_error("train: block " + f.string() + " lacks labels");
    if (attr_dim < 0) attr_dim = c.attr_dim;
    rffs::check(c.attr_dim == attr_dim, "train: inconsistent attribute columns across blocks");
    for (int32_t l : c.labels) max_label = std::max(max_label, l);
    clouds.push_back(std::move(c));
  }
  if (arch.input_channels != 3 + attr_dim) {
    rffs::check(arch.input_channels == 3,
                "train: architecture expects " + std::to_string(arch.input_channels) +
                    " input channels but data provides " + std::to_string(3 + attr_dim) +
                    " (dataset/architecture mismatch)");
    arch.input_channels = 3 + attr_dim;
  }
  rffs::check(max_label < arch.classes,
              "train: data contains label " + std::to_string(max_label) +
                  " but architecture has " + std::to_string(arch.classes) +
                  " classes (dataset/architecture mismatch)");

  std::vector<rffs::BlockData> blocks;
  for (size_t i = 0; i < clouds.size(); ++i) {
    const auto idx = rffs::sample_block(clouds[i].size(), points_per_block,
                                        rffs::seed_mix(cfg.seed, 0x424c4bULL + i));
    rffs::PointCloud sampled = rffs::extract_points(clouds[i], idx);
    blocks.push_back(rffs::prepare_cloud(arch, sampled, cfg.seed));
  }

  // Fresh network or resume.
  int start_epoch = 0;
  std::optional<rffs::RffsNet> net;
  std::optional<rffs::AdamState> adam;
  if (!opt.resume.empty()) {
    rffs::Checkpoint ck = rffs::load_checkpoint(opt.resume);
    rffs::check(ck.arch == arch,
                "train: checkpoint architecture does not match the requested configuration");
    net.emplace(rffs::net_from_checkpoint(ck));
    rffs::AdamState st = rffs::adam_from_checkpoint(ck, *net);
    st.cfg = cfg.adam;
    adam.emplace(std::move(st));
    start_epoch = static_cast<int>(ck.epoch);
  } else {
    net.emplace(arch, cfg.seed);
    adam.emplace(rffs::AdamState::init(net->params(), cfg.adam));
  }

  std::ofstream log(metrics_log, opt.resume.empty() ? std::ios::trunc : std::ios::app);
  if (!log) throw std::runtime_error("train: cannot open metrics log " + metrics_log);

  auto on_epoch = [&](const rffs::EpochStats& st) {
    json line;
    line["epoch"] = st.epoch;
    line["total_loss"] = st.total_loss;
    line["per_level_losses"] = st.level_losses;
    line["oa"] = st.oa;
    line["mf1"] = st.mf1;
    line["miou"] = st.miou;
    log << line.dump() << '\n';
    log.flush();
    rffs::save_checkpoint(out_checkpoint, *net, *adam, st.epoch + 1, cfg.seed);
    return true;
  };

  rffs::train(*net, *adam, cfg, blocks, start_epoch, on_epoch);
  std::cout << "trained " << cfg.epochs << " epochs over " << blocks.size()
            << " block(s); checkpoint: " << out_checkpoint << ", log: " << metrics_log << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict / eval
// ---------------------------------------------------------------------------

int cmd_predict(const std::string& checkpoint, const std::string& input,
                const std::string& schema, const std::string& out, uint64_t seed) {
  rffs::Checkpoint ck = rffs::load_checkpoint(checkpoint);
  rffs::RffsNet net = rffs::net_from_checkpoint(ck);
  rffs::PointCloud cloud = rffs::parse_points(input, rffs::ColumnSchema::parse(schema));
  std::vector<int32_t> pred = rffs::predict_cloud(net, cloud, seed);
  rffs::write_predictions(cloud, pred, out);
  std::cout << "wrote " << pred.size() << " predictions to " << out << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& data, const std::string& schema,
             const std::string& report_path, const std::string& confusion_path,
             const std::string& class_names, uint64_t seed) {
  rffs::Checkpoint ck = rffs::load_checkpoint(checkpoint);
  rffs::RffsNet net = rffs::net_from_checkpoint(ck);
  const int classes = net.config().classes;

  rffs::ClassMap cmap = class_names.empty() ? rffs::ClassMap::generic(classes)
                                            : rffs::synth_class_map(parse_name_list(class_names));
  rffs::check(cmap.count() == classes, "eval: --classes lists " + std::to_string(cmap.count()) +
                                           " names but the checkpoint has " +
                                           std::to_string(classes) + " classes");

  rffs::ConfusionMatrix cm(classes);
  const auto files = dataset_files(data);
  for (const auto& f : files) {
    rffs::PointCloud cloud = rffs::parse_points(f.string(), rffs::ColumnSchema::parse(schema));
    if (!cloud.fully_labeled())
      throw std::runtime_error("eval: labels required, but " + f.string() + " is unlabeled");
    std::vector<int32_t> pred = rffs::predict_cloud(net, cloud, seed);
    cm.merge(rffs::confusion(cloud.labels, pred, classes));
  }
  rffs::MetricsReport rep = rffs::per_class_metrics(cm, cmap);
  rffs::export_report(rep, report_path, rffs::ReportFormat::kJson);
  if (!confusion_path.empty()) rffs::export_confusion_csv(cm, cmap, confusion_path);
  std::printf("eval: oa=%.4f mf1=%.4f miou=%.4f over %zu block(s); report: %s\n", rep.oa, rep.mf1,
              rep.miou, files.size(), report_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"receptive-field fusion/stratification point-cloud classifier"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic scene");
  std::string sy_out, sy_classes = "ground,building,pole,line,vegetation";
  double sy_extent = 30.0, sy_density = 4.55;
  uint64_t sy_seed = env_seed_fallback();
  synth->add_option("--out", sy_out, "output point file")->required();
  synth->add_option("--classes", sy_classes, "comma-separated class subset");
  synth->add_option("--extent", sy_extent, "square scene side, meters");
  synth->add_option("--density", sy_density, "points per square meter");
  synth->add_option("--seed", sy_seed, "generation seed");

  // blocks
  auto* blocks = app.add_subcommand("blocks", "partition a scene into blocks");
  std::string bl_input, bl_schema = "x y z label", bl_out;
  double bl_size = 30.0;
  int bl_min = 64;
  blocks->add_option("--input", bl_input, "scene point file")->required();
  blocks->add_option("--schema", bl_schema, "column schema when no #cols header");
  blocks->add_option("--block-size", bl_size, "horizontal block size, meters (30/50/75)")
      ->check(CLI::PositiveNumber);
  blocks->add_option("--min-count", bl_min, "merge blocks smaller than this");
  blocks->add_option("--out-dir", bl_out, "output directory")->required();

  // graphs
  auto* graphs = app.add_subcommand("graphs", "dump hierarchy and neighbor graphs as JSON");
  std::string gr_input, gr_schema = "x y z label", gr_dil = "1,2,4,8", gr_out;
  int gr_k = 32, gr_delta = 4;
  uint64_t gr_seed = env_seed_fallback();
  graphs->add_option("--input", gr_input, "block point file")->required();
  graphs->add_option("--schema", gr_schema, "column schema when no #cols header");
  graphs->add_option("--k", gr_k, "neighbors per point");
  graphs->add_option("--delta", gr_delta, "sparse sampling step");
  graphs->add_option("--dilations", gr_dil, "comma-separated dilation rates");
  graphs->add_option("--out", gr_out, "output JSON path")->required();
  graphs->add_option("--seed", gr_seed, "sampling seed");

  // train
  auto* train = app.add_subcommand("train", "train on preprocessed blocks");
  TrainOptions topt;
  train->add_option("--config", topt.config_path, "JSON run config (flags override)");
  train->add_option("--data", topt.data, "block file or directory");
  train->add_option("--schema", topt.schema, "column schema when no #cols header");
  train->add_option("--seed", topt.seed, "training seed");
  train->add_option("--epochs", topt.epochs, "training epochs");
  train->add_option("--batch-size", topt.batch_size, "blocks per optimizer step");
  train->add_option("--lr", topt.lr, "learning rate");
  train->add_option("--weight-decay", topt.weight_decay, "decoupled weight decay");
  train->add_option("--points-per-block", topt.points_per_block, "sampled points per block");
  train->add_option("--out-checkpoint", topt.out_checkpoint, "checkpoint path");
  train->add_option("--metrics-log", topt.metrics_log, "JSONL metrics log path");
  train->add_option("--resume", topt.resume, "checkpoint to resume from");
  train->add_option("--loss-weights", topt.loss_weights, "four per-level loss weights");
  train->add_option("--loss-preset", topt.loss_preset, "isprs | lasdu | dfc2019");
  train->add_option("--loss-reduction", topt.loss_reduction, "mean | sum");
  train->add_option("--dilations", topt.dilations, "fusion dilation rates");
  train->add_option("--aggregation", topt.aggregation, "branch aggregation: concat | add");
  train->add_flag("--no-dense", topt.no_dense, "disable dense cascade connections");
  train->add_flag("--no-mrfa", topt.no_mrfa, "supervise only the finest level");

  // predict
  auto* predict = app.add_subcommand("predict", "label a block with a trained checkpoint");
  std::string pr_ckpt, pr_input, pr_schema = "x y z label", pr_out;
  uint64_t pr_seed = env_seed_fallback();
  predict->add_option("--checkpoint", pr_ckpt)->required();
  predict->add_option("--input", pr_input)->required();
  predict->add_option("--schema", pr_schema, "column schema when no #cols header");
  predict->add_option("--out", pr_out, "predictions file")->required();
  predict->add_option("--seed", pr_seed, "sampling seed for undersized blocks");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on labeled blocks");
  std::string ev_ckpt, ev_data, ev_schema = "x y z label", ev_report, ev_confusion, ev_classes;
  uint64_t ev_seed = env_seed_fallback();
  eval->add_option("--checkpoint", ev_ckpt)->required();
  eval->add_option("--data", ev_data, "block file or directory")->required();
  eval->add_option("--schema", ev_schema, "column schema when no #cols header");
  eval->add_option("--report", ev_report, "metrics report JSON path")->required();
  eval->add_option("--confusion", ev_confusion, "confusion matrix CSV path");
  eval->add_option("--classes", ev_classes, "comma-separated class names");
  eval->add_option("--seed", ev_seed, "sampling seed for undersized blocks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(sy_out, sy_classes, sy_extent, sy_density, sy_seed);
    if (blocks->parsed()) return cmd_blocks(bl_input, bl_schema, bl_size, bl_min, bl_out);
    if (graphs->parsed())
      return cmd_graphs(gr_input, gr_schema, gr_k, gr_delta, gr_dil, gr_out, gr_seed);
    if (train->parsed()) {
      std::set<std::string> given;
      for (const auto* o : train->get_options())
        if (o->count() > 0) {
          std::string n = o->get_name();
          if (n.rfind("--", 0) == 0) n = n.substr(2);
          std::replace(n.begin(), n.end(), '-', '_');
          given.insert(n);
        }
      return cmd_train(topt, given);
    }
    if (predict->parsed()) return cmd_predict(pr_ckpt, pr_input, pr_schema, pr_out, pr_seed);
    if (eval->parsed())
      return cmd_eval(ev_ckpt, ev_data, ev_schema, ev_report, ev_confusion, ev_classes, ev_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
