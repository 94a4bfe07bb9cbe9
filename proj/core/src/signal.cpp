#include "cyclosense/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "cyclosense/rng.hpp"

namespace cyclosense {

SignalModel SignalModel::bpsk(int n_sym) {
  if (n_sym < 1) throw std::invalid_argument("SignalModel: n_sym must be >= 1");
  SignalModel model;
  model.n_sym = n_sym;
  model.d_phi = (n_sym + 1) / 2.0;
  model.sigma_a2 = 1.0;
  model.modulation = Modulation::kBpsk;
  return model;
}

std::vector<double> generate_symbols(std::size_t count, std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> symbols(count);
  for (auto& s : symbols) s = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return symbols;
}

cvec modulate(std::span<const double> symbols, int n_sym) {
  if (n_sym < 1) throw std::invalid_argument("modulate: n_sym must be >= 1");
  cvec out;
  out.reserve(symbols.size() * static_cast<std::size_t>(n_sym));
  for (double s : symbols) {
    for (int i = 0; i < n_sym; ++i) out.emplace_back(s, 0.0);
  }
  return out;
}

SampleRecord generate_signal(const SignalModel& model, std::size_t n,
                             std::uint64_t seed) {
  if (model.n_sym < 1)
    throw std::invalid_argument("generate_signal: n_sym must be >= 1");
  if (model.sigma_a2 <= 0.0)
    throw std::invalid_argument("generate_signal: sigma_a2 must be positive");
  if (n == 0 || n % static_cast<std::size_t>(model.n_sym) != 0)
    throw std::invalid_argument(
        "generate_signal: block size must be a positive multiple of n_sym");
  const std::size_t n_symbols = n / static_cast<std::size_t>(model.n_sym);
  const std::vector<double> symbols = generate_symbols(n_symbols, seed);
  SampleRecord record;
  record.samples = modulate(symbols, model.n_sym);
  const double amplitude = std::sqrt(model.sigma_a2);
  if (amplitude != 1.0) {
    for (auto& v : record.samples) v *= amplitude;
  }
  record.seed = seed;
  return record;
}

SampleRecord add_awgn(const SampleRecord& record, double snr_db,
                      std::uint64_t seed) {
  if (std::isnan(snr_db))
    throw std::invalid_argument("add_awgn: snr_db must not be NaN");
  SampleRecord out = record;
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  double reference = mean_power(record.samples);
  if (reference <= 0.0) reference = 1.0;
  const double noise_power = reference * std::pow(10.0, -snr_db / 10.0);
  RandomSource rng(seed);
  for (auto& v : out.samples) v += rng.circular_gaussian(noise_power);
  out.seed = seed;
  return out;
}

SampleRecord generate_h0(std::size_t n, double noise_power,
                         std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_h0: n must be positive");
  if (noise_power <= 0.0)
    throw std::invalid_argument("generate_h0: noise power must be positive");
  SampleRecord record;
  record.samples.resize(n);
  RandomSource rng(seed);
  for (auto& v : record.samples) v = rng.circular_gaussian(noise_power);
  record.seed = seed;
  return record;
}

double mean_power(std::span<const cplx> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : samples) acc += std::norm(v);
  return acc / static_cast<double>(samples.size());
}

}  // namespace cyclosense
