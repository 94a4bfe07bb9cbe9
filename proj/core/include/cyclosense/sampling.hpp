#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cyclosense/caf.hpp"

namespace cyclosense {

/// Row-selection pattern for the undersampling operation: a consecutive
/// prefix 0..consecutive_count-1 followed by a sorted uniform random subset
/// of the remaining rows.
struct SamplingMask {
  int n = 0;
  int consecutive_count = 0;
  std::vector<int> indices;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(indices.size()); }
};

SamplingMask build_mask(const SensingConfig& cfg, std::uint64_t seed);

/// Rows of a full delay-product matrix at the mask positions, order kept.
DelayProductMatrix undersample(const DelayProductMatrix& products,
                               const SamplingMask& mask);

/// The linear map from a CA matrix to the undersampled delay products,
/// conceptually n * S * F^{-1} per delay with the per-row phase convention
/// of the classical estimator folded in, so that
///   apply(classical_ca(x)) == undersample(delay_product_matrix(x)).
///
/// Columns of the per-delay operator differ from the shared Fourier atoms
/// only by a unit-modulus scalar, which keeps a single factorization usable
/// for every delay. Evaluation is matrix-free: atoms are generated on
/// demand and adjoint correlations go through one FFT per delay.
class MeasurementOperator {
 public:
  MeasurementOperator(SamplingMask mask, std::vector<int> delays);

  int n() const { return mask_.n; }
  int m() const { return mask_.size(); }
  const SamplingMask& mask() const { return mask_; }
  const std::vector<int>& delays() const { return delays_; }

  /// Exact undersampled delay products of a CA matrix.
  DelayProductMatrix apply(const CaMatrix& ca) const;
  DelayProductMatrix apply(const CaMatrix& ca, Dft& dft) const;

  /// Phase-free Fourier atom: column j of n * S * F^{-1},
  /// entries exp(+j 2 pi mask[i] j / n). Every atom has l2 norm sqrt(m).
  cvec atom(int j) const;

  /// Unit scalar relating the delay-d operator column to the shared atom:
  /// column_j(d) = atom(j) * column_phase(j, d).
  cplx column_phase(int j, int d) const;

  /// Forward DFT of a residual scattered onto the mask rows; its magnitude
  /// equals the per-delay atom correlation |(residual)^H A| used for greedy
  /// support selection. The Dft overload reuses a caller-owned plan.
  cvec scatter_spectrum(std::span<const cplx> residual) const;
  cvec scatter_spectrum(std::span<const cplx> residual, Dft& dft) const;

 private:
  SamplingMask mask_;
  std::vector<int> delays_;
};

}  // namespace cyclosense
