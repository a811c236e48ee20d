#include <benchmark/benchmark.h>

#include "rffs/common.hpp"
#include "rffs/loss.hpp"
#include "rffs/model.hpp"
#include "rffs/trainer.hpp"

namespace {

rffs::ArchConfig bench_arch(int n) {
  rffs::ArchConfig cfg;
  if (n < 4096) {
    cfg.k = 16;
    cfg.dilations = {1, 2};
    cfg.encoder_channels = {32, 64, 128};
    cfg.fused_channels = 128;
    cfg.decoder_channels = {64, 64, 128};
  }
  return cfg;
}

rffs::BlockData prepared(int n) {
  rffs::Rng rng(999);
  rffs::PointCloud cloud;
  for (int i = 0; i < n; ++i) {
    cloud.xyz.push_back(
        rffs::Vec3{rng.uniformf(0, 30), rng.uniformf(0, 30), rng.uniformf(0, 12)});
    cloud.labels.push_back(static_cast<int32_t>(rng.below(5)));
  }
  return rffs::prepare_cloud(bench_arch(n), cloud, 0);
}

void BM_ForwardOnly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rffs::RffsNet net(bench_arch(n), 1);
  rffs::BlockData block = prepared(n);
  for (auto _ : state) {
    rffs::Tape tape;
    auto fw = net.forward(tape, block, /*requires_grad=*/false);
    benchmark::DoNotOptimize(tape.val(fw.logits[0]).data.data());
  }
}
BENCHMARK(BM_ForwardOnly)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rffs::RffsNet net(bench_arch(n), 1);
  rffs::AdamState opt = rffs::AdamState::init(net.params(), rffs::AdamConfig{});
  rffs::BlockData block = prepared(n);
  rffs::LossWeights w;
  for (auto _ : state) {
    rffs::Tape tape;
    auto fw = net.forward(tape, block, /*requires_grad=*/true);
    auto loss = rffs::mrfa_loss(
        tape, fw.logits,
        {&block.hier.level(0).labels, &block.hier.level(1).labels, &block.hier.level(2).labels,
         &block.hier.level(3).labels},
        w);
    tape.backward(loss.total);
    std::vector<rffs::Tensor> grads;
    for (int p = 0; p < net.params().count(); ++p) grads.push_back(tape.grad(fw.params[p]));
    rffs::adam_step(net.params(), grads, opt);
    benchmark::DoNotOptimize(net.params().entry(0).value.data.data());
  }
}
BENCHMARK(BM_TrainStep)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
