// bench_core.cpp
// Microbenchmarks for the hot paths: STFT round trip, image-source RIRs, and
// per-bin LS designs.

#include <benchmark/benchmark.h>

#include <random>

#include "ndf/beamformer.hpp"
#include "ndf/masks.hpp"
#include "ndf/room.hpp"
#include "ndf/stft.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 0.1);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

void BM_StftRoundTrip(benchmark::State& state) {
  const auto x = noise(64000, 7);
  for (auto _ : state) {
    const auto spec = ndf::stft(x);
    benchmark::DoNotOptimize(ndf::istft(spec));
  }
}
BENCHMARK(BM_StftRoundTrip);

void BM_SimulateRir(benchmark::State& state) {
  ndf::RoomSpec room{8.0, 6.0, 4.0, 0.1 * state.range(0)};
  const ndf::Vec3 src{2.0, 3.0, 1.5};
  const ndf::Vec3 mic{5.0, 3.5, 1.5};
  for (auto _ : state)
    benchmark::DoNotOptimize(ndf::simulate_rir(room, src, mic, {}));
}
BENCHMARK(BM_SimulateRir)->Arg(2)->Arg(4)->Arg(6);

void BM_SimulateVdmRir(benchmark::State& state) {
  ndf::RoomSpec room{8.0, 6.0, 4.0, 0.4};
  const ndf::Vec3 src{2.0, 3.0, 1.5};
  const ndf::Vec3 mic{5.0, 3.5, 1.5};
  const auto pattern = ndf::pattern_preset("dma1");
  for (auto _ : state)
    benchmark::DoNotOptimize(ndf::simulate_vdm_rir(room, src, mic, pattern, {}));
}
BENCHMARK(BM_SimulateVdmRir);

void BM_LsDesign(benchmark::State& state) {
  const auto array = ndf::build_array(0.03);
  const auto pattern = ndf::pattern_preset("dma1");
  const auto angles = ndf::default_angle_grid_deg();
  std::vector<double> freqs;
  for (int k = 1; k <= state.range(0); ++k) freqs.push_back(250.0 * k);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ndf::design_ls_beamformer(array, pattern, freqs, angles, -15.0));
}
BENCHMARK(BM_LsDesign)->Arg(8)->Arg(32);

void BM_OracleMask(benchmark::State& state) {
  const auto x0 = noise(64000, 1);
  const auto x1 = noise(64000, 2);
  const std::vector<ndf::Spectrogram> stems = {ndf::stft(x0), ndf::stft(x1)};
  const std::vector<ndf::Doa> doas = {ndf::Doa::from_deg(0), ndf::Doa::from_deg(90)};
  const auto pattern = ndf::pattern_preset("dma3");
  for (auto _ : state)
    benchmark::DoNotOptimize(ndf::oracle_parametric_mask(stems, doas, pattern));
}
BENCHMARK(BM_OracleMask);

}  // namespace

BENCHMARK_MAIN();
