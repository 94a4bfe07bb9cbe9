#include "cyclosense/window.hpp"

#include <cmath>
#include <stdexcept>

namespace cyclosense {

namespace {

void check_length(int length) {
  if (length < 1 || length % 2 == 0)
    throw std::invalid_argument("SpectralWindow: length must be odd and >= 1");
}

void normalize_to_length(std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  const double scale = static_cast<double>(weights.size()) / sum;
  for (double& w : weights) w *= scale;
}

}  // namespace

SpectralWindow SpectralWindow::kaiser(int length, double alpha) {
  check_length(length);
  SpectralWindow window;
  window.weights.resize(static_cast<std::size_t>(length));
  if (length == 1) {
    window.weights[0] = 1.0;
    return window;
  }
  const double denom = std::cyl_bessel_i(0.0, alpha);
  const double half_span = (length - 1) / 2.0;
  for (int i = 0; i < length; ++i) {
    const double u = (static_cast<double>(i) - half_span) / half_span;
    window.weights[static_cast<std::size_t>(i)] =
        std::cyl_bessel_i(0.0, alpha * std::sqrt(1.0 - u * u)) / denom;
  }
  normalize_to_length(window.weights);
  return window;
}

SpectralWindow SpectralWindow::rectangular(int length) {
  check_length(length);
  SpectralWindow window;
  window.weights.assign(static_cast<std::size_t>(length), 1.0);
  return window;
}

}  // namespace cyclosense
