#pragma once

#include <vector>

namespace cyclosense {

/// Odd-length spectral smoothing window, normalized so the weights sum to
/// the window length (a unit-gain smoother for constant inputs).
struct SpectralWindow {
  std::vector<double> weights;

  int length() const { return static_cast<int>(weights.size()); }
  int half() const { return (length() - 1) / 2; }
  /// Weight at signed offset s in [-half, half].
  double at(int s) const { return weights[static_cast<std::size_t>(s + half())]; }

  static SpectralWindow kaiser(int length, double alpha);
  static SpectralWindow rectangular(int length);
};

}  // namespace cyclosense
