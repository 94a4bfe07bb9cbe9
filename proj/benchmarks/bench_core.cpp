#include <benchmark/benchmark.h>

#include "cyclosense/detector.hpp"
#include "cyclosense/dictionary.hpp"
#include "cyclosense/recovery.hpp"
#include "cyclosense/rng.hpp"
#include "cyclosense/signal.hpp"

using namespace cyclosense;

namespace {

SampleRecord noisy_signal(int n, std::uint64_t seed) {
  return add_awgn(generate_signal(SignalModel::bpsk(8),
                                  static_cast<std::size_t>(n), seed),
                  0.0, mix_seed(seed, 1));
}

SensingConfig table_cfg(int n, int m) {
  SensingConfig cfg;
  cfg.n = n;
  cfg.m_avail = m;
  cfg.delays = {1, 2, 3, 4};
  cfg.c_r = 0.15;
  return cfg;
}

void ClassicalCa(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SampleRecord record = noisy_signal(n, 10);
  const std::vector<int> delays = {1, 2, 3, 4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(classical_ca(record.samples, delays));
  }
  state.SetComplexityN(n);
}
BENCHMARK(ClassicalCa)->Arg(1000)->Arg(4000)->Complexity();

void SoberRecovery(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SensingConfig cfg = table_cfg(n, n / 4);
  const SampleRecord record = noisy_signal(n, 20);
  const SamplingMask mask = build_mask(cfg, 21);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);
  const int n_iter = n / 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(somp_estimate(pu, op, n_iter));
  }
}
BENCHMARK(SoberRecovery)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void HadesRecovery(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SensingConfig cfg = table_cfg(n, n / 4);
  const SampleRecord record = noisy_signal(n, 30);
  const SamplingMask mask = build_mask(cfg, 31);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);
  std::vector<StructureDictionary> dicts(cfg.delays.size(),
                                         build_symmetry_dictionary(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hades_estimate(pu, op, 3, dicts));
  }
}
BENCHMARK(HadesRecovery)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void CovarianceEstimation(benchmark::State& state) {
  const SampleRecord record = generate_h0(1000, 1.0, 40);
  const std::vector<int> delays = {1, 2, 3, 4};
  const CaMatrix ca = classical_ca(record.samples, delays);
  const SpectralWindow window = SpectralWindow::kaiser(201, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_covariance(ca, 125, window));
  }
}
BENCHMARK(CovarianceEstimation);

void SparseTdt(benchmark::State& state) {
  const SensingConfig cfg = table_cfg(1000, 250);
  const SampleRecord record = noisy_signal(1000, 50);
  const SamplingMask mask = build_mask(cfg, 51);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);
  std::vector<StructureDictionary> dicts(cfg.delays.size(),
                                         build_symmetry_dictionary(1000));
  const RecoveryState recovered = hades_estimate(pu, op, 3, dicts);
  const SpectralWindow window = SpectralWindow::kaiser(37, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sparse_tdt_statistic(pu, mask, recovered, cfg, window));
  }
}
BENCHMARK(SparseTdt);

}  // namespace

BENCHMARK_MAIN();
