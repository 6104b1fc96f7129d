#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "hom/estimation.hpp"

namespace {

using namespace hom;

ExperimentConfig two_laser_config(double gate_width) {
  const double sigma = sigma_for_linewidth(10e6);
  const double w0 = 2 * std::numbers::pi * 193.25e12;
  const double dw = 2 * std::numbers::pi * 100e6;
  ExperimentConfig cfg;
  cfg.packet1 = WavePacket{0, sigma, w0 + dw / 2, 0};
  cfg.packet2 = WavePacket{0, sigma, w0 - dw / 2, 0};
  cfg.gate = GateConfig{gate_width, 0};
  cfg.delays = symmetric_delays(6 * sigma + gate_width, 0.1e-9);
  return cfg;
}

void BM_SpectrumOf(benchmark::State& state) {
  const WavePacket p{0, sigma_for_linewidth(10e6), 1e15, 0};
  const auto mode = evaluate_temporal(p, default_time_grid(0, p.sigma, 4e-9), 1e15);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_of(mode));
  state.counters["samples"] = static_cast<double>(mode.size());
}
BENCHMARK(BM_SpectrumOf)->Unit(benchmark::kMillisecond);

void BM_GatedSpectra(benchmark::State& state) {
  const auto cfg = two_laser_config(static_cast<double>(state.range(0)) * 1e-9);
  for (auto _ : state) benchmark::DoNotOptimize(gated_spectra(cfg));
}
BENCHMARK(BM_GatedSpectra)->Arg(4)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CoincidenceCurve(benchmark::State& state) {
  const auto cfg = two_laser_config(static_cast<double>(state.range(0)) * 1e-9);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_interferogram(cfg));
  state.counters["bins"] = static_cast<double>(cfg.delays.count);
}
BENCHMARK(BM_CoincidenceCurve)->Arg(4)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FitFringe(benchmark::State& state) {
  const auto data = synthesize_interferogram(two_laser_config(4e-9));
  for (auto _ : state) benchmark::DoNotOptimize(fit_fringe(data));
}
BENCHMARK(BM_FitFringe)->Unit(benchmark::kMillisecond);

void BM_FitGaussian(benchmark::State& state) {
  const auto spectra = gated_spectra(two_laser_config(4e-9));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian(spectra.first.samples()));
}
BENCHMARK(BM_FitGaussian)->Unit(benchmark::kMillisecond);

void BM_MonteCarloOracle(benchmark::State& state) {
  const auto cfg = two_laser_config(6e-9);
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_coincidence_oracle(cfg, 3e-9, static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloOracle)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
