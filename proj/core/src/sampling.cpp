#include "cyclosense/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cyclosense/rng.hpp"

namespace cyclosense {

SamplingMask build_mask(const SensingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int n = cfg.n;
  const int m = cfg.m_avail;
  const int consecutive = cfg.consecutive_count();
  if (consecutive > m)
    throw std::invalid_argument("build_mask: consecutive prefix exceeds m");

  SamplingMask mask;
  mask.n = n;
  mask.consecutive_count = consecutive;
  mask.seed = seed;
  mask.indices.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < consecutive; ++i) mask.indices.push_back(i);

  // Sequential selection sampling over {consecutive .. n-1}: ascending by
  // construction, uniform over subsets, deterministic for a given seed.
  RandomSource rng(seed);
  int needed = m - consecutive;
  int pool = n - consecutive;
  for (int candidate = consecutive; candidate < n && needed > 0; ++candidate) {
    if (rng.uniform_index(static_cast<std::uint64_t>(pool)) <
        static_cast<std::uint64_t>(needed)) {
      mask.indices.push_back(candidate);
      --needed;
    }
    --pool;
  }
  return mask;
}

DelayProductMatrix undersample(const DelayProductMatrix& products,
                               const SamplingMask& mask) {
  if (products.rows() != products.full_size || products.full_size != mask.n)
    throw std::invalid_argument(
        "undersample: mask and matrix sizes do not match");
  DelayProductMatrix out;
  out.full_size = products.full_size;
  out.delays = products.delays;
  out.columns.resize(products.columns.size());
  for (std::size_t l = 0; l < products.columns.size(); ++l) {
    const cvec& src = products.columns[l];
    cvec& dst = out.columns[l];
    dst.reserve(mask.indices.size());
    for (int idx : mask.indices) {
      if (idx < 0 || idx >= products.full_size)
        throw std::invalid_argument("undersample: mask index out of range");
      dst.push_back(src[static_cast<std::size_t>(idx)]);
    }
  }
  return out;
}

MeasurementOperator::MeasurementOperator(SamplingMask mask,
                                         std::vector<int> delays)
    : mask_(std::move(mask)), delays_(std::move(delays)) {
  if (mask_.n <= 0 || mask_.indices.empty())
    throw std::invalid_argument("MeasurementOperator: empty mask");
  if (delays_.empty())
    throw std::invalid_argument("MeasurementOperator: empty delay list");
}

DelayProductMatrix MeasurementOperator::apply(const CaMatrix& ca) const {
  Dft dft(static_cast<std::size_t>(mask_.n));
  return apply(ca, dft);
}

DelayProductMatrix MeasurementOperator::apply(const CaMatrix& ca,
                                              Dft& dft) const {
  if (ca.n != mask_.n || dft.size() != static_cast<std::size_t>(mask_.n))
    throw std::invalid_argument("MeasurementOperator::apply: size mismatch");
  if (ca.delays != delays_)
    throw std::invalid_argument("MeasurementOperator::apply: delay mismatch");
  DelayProductMatrix out;
  out.full_size = mask_.n;
  out.delays = delays_;
  out.columns.resize(delays_.size());
  const double n = static_cast<double>(mask_.n);
  cvec unphased(static_cast<std::size_t>(mask_.n));
  for (std::size_t l = 0; l < delays_.size(); ++l) {
    const int d = delays_[l];
    for (int k = 0; k < mask_.n; ++k) {
      // Undo the classical estimator's per-row phase before inverting.
      unphased[static_cast<std::size_t>(k)] =
          ca.columns[l][static_cast<std::size_t>(k)] *
          std::conj(ca_row_phase(k, d, mask_.n));
    }
    const cvec full = dft.inverse(unphased);
    cvec& col = out.columns[l];
    col.reserve(mask_.indices.size());
    for (int idx : mask_.indices) {
      col.push_back(n * full[static_cast<std::size_t>(idx)]);
    }
  }
  return out;
}

cvec MeasurementOperator::atom(int j) const {
  if (j < 0 || j >= mask_.n)
    throw std::invalid_argument("MeasurementOperator::atom: index out of range");
  cvec col;
  col.reserve(mask_.indices.size());
  const double step = 2.0 * std::numbers::pi * static_cast<double>(j) /
                      static_cast<double>(mask_.n);
  for (int idx : mask_.indices) {
    col.push_back(std::polar(1.0, step * static_cast<double>(idx)));
  }
  return col;
}

cplx MeasurementOperator::column_phase(int j, int d) const {
  return std::conj(ca_row_phase(j, d, mask_.n));
}

cvec MeasurementOperator::scatter_spectrum(
    std::span<const cplx> residual) const {
  Dft dft(static_cast<std::size_t>(mask_.n));
  return scatter_spectrum(residual, dft);
}

cvec MeasurementOperator::scatter_spectrum(std::span<const cplx> residual,
                                           Dft& dft) const {
  if (static_cast<int>(residual.size()) != mask_.size() ||
      dft.size() != static_cast<std::size_t>(mask_.n))
    throw std::invalid_argument(
        "MeasurementOperator::scatter_spectrum: residual size mismatch");
  cvec scattered(static_cast<std::size_t>(mask_.n), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < residual.size(); ++i) {
    scattered[static_cast<std::size_t>(mask_.indices[i])] = residual[i];
  }
  return dft.forward(scattered);
}

}  // namespace cyclosense
