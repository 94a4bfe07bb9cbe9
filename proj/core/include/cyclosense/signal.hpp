#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cyclosense/fft.hpp"

namespace cyclosense {

enum class Modulation { kBpsk };

/// Linearly modulated signal model: rectangular pulse of n_sym samples,
/// pulse-timing phase d_phi, average symbol power sigma_a2.
struct SignalModel {
  int n_sym = 8;
  double d_phi = 4.5;  // (n_sym + 1) / 2 samples the symbol off its edges
  double sigma_a2 = 1.0;
  Modulation modulation = Modulation::kBpsk;

  static SignalModel bpsk(int n_sym);
};

/// A block of complex baseband samples plus sampling metadata.
struct SampleRecord {
  cvec samples;
  double sample_period = 1.0;  // seconds, informational
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.size(); }
};

/// i.i.d. equiprobable {+1, -1} symbol sequence.
std::vector<double> generate_symbols(std::size_t count, std::uint64_t seed);

/// Rectangular-pulse modulation: each symbol is held for n_sym samples.
cvec modulate(std::span<const double> symbols, int n_sym);

/// n samples of the modulated signal; n must be a positive multiple of
/// model.n_sym (keeps the discrete cycle frequencies on DFT bin centers).
SampleRecord generate_signal(const SignalModel& model, std::size_t n,
                             std::uint64_t seed);

/// Adds circularly symmetric complex AWGN at the requested SNR, referenced
/// to the empirical mean power of the input (unit power for an all-zero
/// record). snr_db = +inf returns the input unchanged.
SampleRecord add_awgn(const SampleRecord& record, double snr_db,
                      std::uint64_t seed);

/// Pure complex AWGN block with the given total variance per sample.
SampleRecord generate_h0(std::size_t n, double noise_power,
                         std::uint64_t seed);

double mean_power(std::span<const cplx> samples);

}  // namespace cyclosense
