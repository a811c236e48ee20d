#include "rffs/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace rffs {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'R', 'F', 'F', 'S', 'C', 'K', 'P', 'T'};

using nlohmann::json;

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

void save_checkpoint(const std::string& path, const RffsNet& net, const AdamState& opt,
                     int64_t epoch, uint64_t seed) {
  const auto& params = net.params();
  check(static_cast<int>(opt.m.size()) == params.count(),
        "save_checkpoint: optimizer state does not match parameters");

  json tensors = json::array();
  uint64_t offset = 0;
  std::vector<const Tensor*> payload;
  auto add = [&](const std::string& name, const Tensor& t) {
    tensors.push_back({{"name", name}, {"shape", t.shape}, {"offset", offset}});
    payload.push_back(&t);
    offset += static_cast<uint64_t>(t.numel()) * sizeof(float);
  };
  for (int i = 0; i < params.count(); ++i) add(params.entry(i).name, params.entry(i).value);
  for (int i = 0; i < params.count(); ++i)
    add("opt.m/" + params.entry(i).name, opt.m[static_cast<size_t>(i)]);
  for (int i = 0; i < params.count(); ++i)
    add("opt.v/" + params.entry(i).name, opt.v[static_cast<size_t>(i)]);

  json header;
  header["arch"] = json::parse(arch_to_json(net.config()));
  header["epoch"] = epoch;
  header["seed"] = seed;
  header["adam"] = {{"lr", opt.cfg.lr},
                    {"beta1", opt.cfg.beta1},
                    {"beta2", opt.cfg.beta2},
                    {"eps", opt.cfg.eps},
                    {"weight_decay", opt.cfg.weight_decay},
                    {"step", opt.step}};
  header["tensors"] = std::move(tensors);
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kMagic, 8);
  const uint32_t version = kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  for (const Tensor* t : payload)
    out.write(reinterpret_cast<const char*>(t->data.data()),
              static_cast<std::streamsize>(t->numel() * sizeof(float)));
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  const uint64_t file_size = static_cast<uint64_t>(in.tellg());
  in.seekg(0);

  char magic[8];
  uint32_t version = 0;
  uint64_t hlen = 0;
  if (file_size < 8 + sizeof(version) + sizeof(hlen))
    throw std::runtime_error("load_checkpoint: " + path + " is truncated");
  in.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("load_checkpoint: bad magic in " + path);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kCheckpointVersion)
    throw std::runtime_error("load_checkpoint: unsupported version " + std::to_string(version));
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  const uint64_t header_end = 8 + sizeof(version) + sizeof(hlen) + hlen;
  if (file_size < header_end)
    throw std::runtime_error("load_checkpoint: " + path + " is truncated (header)");

  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  json header;
  try {
    header = json::parse(htext);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("load_checkpoint: corrupt header: ") + e.what());
  }

  Checkpoint ck;
  ck.arch = arch_from_json(header.at("arch").dump());
  ck.epoch = header.at("epoch").get<int64_t>();
  ck.seed = header.at("seed").get<uint64_t>();
  const auto& adam = header.at("adam");
  ck.adam_cfg.lr = adam.at("lr").get<float>();
  ck.adam_cfg.beta1 = adam.at("beta1").get<float>();
  ck.adam_cfg.beta2 = adam.at("beta2").get<float>();
  ck.adam_cfg.eps = adam.at("eps").get<float>();
  ck.adam_cfg.weight_decay = adam.at("weight_decay").get<float>();
  ck.adam_step = adam.at("step").get<int64_t>();

  // Validate the payload extent before loading anything.
  uint64_t payload = 0;
  for (const auto& t : header.at("tensors")) {
    uint64_t n = 1;
    for (int d : t.at("shape").get<std::vector<int>>()) n *= static_cast<uint64_t>(d);
    const uint64_t end = t.at("offset").get<uint64_t>() + n * sizeof(float);
    payload = std::max(payload, end);
  }
  if (file_size != header_end + payload)
    throw std::runtime_error("load_checkpoint: " + path + " is truncated or padded (expected " +
                             std::to_string(header_end + payload) + " bytes, file has " +
                             std::to_string(file_size) + ")");

  for (const auto& t : header.at("tensors")) {
    const auto shape = t.at("shape").get<std::vector<int>>();
    Tensor tensor(shape);
    in.seekg(static_cast<std::streamoff>(header_end + t.at("offset").get<uint64_t>()));
    in.read(reinterpret_cast<char*>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.numel() * sizeof(float)));
    if (!in) throw std::runtime_error("load_checkpoint: read failed in " + path);
    ck.tensors.emplace_back(t.at("name").get<std::string>(), std::move(tensor));
  }
  return ck;
}

RffsNet net_from_checkpoint(const Checkpoint& ck) {
  RffsNet net(ck.arch, /*init_seed=*/0);
  auto& params = net.params();
  for (int i = 0; i < params.count(); ++i) {
    auto& e = params.entry(i);
    const Tensor* t = ck.find(e.name);
    if (t == nullptr)
      throw std::runtime_error("checkpoint: missing parameter " + e.name +
                               " (checkpoint/architecture mismatch)");
    check(t->shape == e.value.shape, "checkpoint: shape mismatch for " + e.name);
    e.value = *t;
  }
  return net;
}

AdamState adam_from_checkpoint(const Checkpoint& ck, const RffsNet& net) {
  AdamState st = AdamState::init(net.params(), ck.adam_cfg);
  st.step = ck.adam_step;
  const auto& params = net.params();
  for (int i = 0; i < params.count(); ++i) {
    const std::string& name = params.entry(i).name;
    const Tensor* m = ck.find("opt.m/" + name);
    const Tensor* v = ck.find("opt.v/" + name);
    if (m == nullptr || v == nullptr)
      throw std::runtime_error("checkpoint: missing optimizer state for " + name);
    st.m[static_cast<size_t>(i)] = *m;
    st.v[static_cast<size_t>(i)] = *v;
  }
  return st;
}

}  // namespace rffs
