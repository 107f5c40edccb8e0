#include <benchmark/benchmark.h>

#include <map>

#include "mwrecon/fft.hpp"
#include "mwrecon/grappa.hpp"
#include "mwrecon/metrics.hpp"
#include "mwrecon/network.hpp"
#include "mwrecon/phantom.hpp"
#include "mwrecon/recon.hpp"
#include "mwrecon/training.hpp"

using namespace mwrecon;

namespace {

const PhantomScan& scan(std::size_t size) {
  static std::map<std::size_t, PhantomScan> cache;
  auto it = cache.find(size);
  if (it == cache.end()) it = cache.emplace(size, make_phantom_scan(size, 8, 30.0, 1)).first;
  return it->second;
}

void BM_Fft2c(benchmark::State& state) {
  const auto& k = scan(static_cast<std::size_t>(state.range(0))).noisy;
  for (auto _ : state) benchmark::DoNotOptimize(ifft2c(k));
}
BENCHMARK(BM_Fft2c)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_GrappaCalibrate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = SamplingPattern::uniform(n, 4, 24);
  const auto acs = extract_acs(apply_pattern(scan(n).noisy, p), p);
  for (auto _ : state) benchmark::DoNotOptimize(calibrate(acs, KernelGeometry{1, 2, 4}));
}
BENCHMARK(BM_GrappaCalibrate)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GrappaInterpolate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = SamplingPattern::uniform(n, 4, 24);
  const auto measured = apply_pattern(scan(n).noisy, p);
  const auto kernel = calibrate(extract_acs(measured, p), KernelGeometry{1, 2, 4});
  for (auto _ : state) benchmark::DoNotOptimize(interpolate(kernel, measured, p));
}
BENCHMARK(BM_GrappaInterpolate)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto net = init_network(NetworkArch::two_layer(8, 4), 1);
  const auto x = to_channels(scan(n).noisy);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, x));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TrainingStep(benchmark::State& state) {
  const auto p = SamplingPattern::uniform(64, 4, 24);
  const auto acs = extract_acs(apply_pattern(scan(64).noisy, p), p);
  const auto arch = NetworkArch::two_layer(8, 4);
  const auto set = build_training_pairs(acs, arch, 0);
  const auto net = init_network(arch, 1);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(net, set));
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = reconstruct_image(scan(n).noisy), b = reconstruct_image(scan(n).clean);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
