#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cyclosense/dictionary.hpp"
#include "cyclosense/sampling.hpp"

namespace cyclosense {

/// Result of a greedy sparse CA recovery.
struct RecoveryState {
  /// Row indices in order of addition. For per-column recovery (plain OMP)
  /// this is the union, iteration-major and delay-minor, first occurrence
  /// kept.
  std::vector<int> support;
  /// Per-delay supports; identical to `support` for the joint algorithms.
  std::vector<std::vector<int>> column_supports;
  CaMatrix estimate;
  /// Final per-delay least-squares residual l2 norms.
  std::vector<double> residual_norms;
  /// residual_history[l][i]: per-delay residual norm after iteration i+1.
  std::vector<std::vector<double>> residual_history;
  int iterations_run = 0;
  bool rank_deficient = false;
};

/// Simultaneous-OMP CA estimator: one support shared by every delay,
/// selected by the l1 norm of the residual correlations across delays.
RecoveryState somp_estimate(const DelayProductMatrix& undersampled,
                            const MeasurementOperator& op, int n_iter);

/// Plain OMP baseline: each delay column selects its own support.
RecoveryState omp_estimate(const DelayProductMatrix& undersampled,
                           const MeasurementOperator& op, int n_iter);

/// Dictionary-assisted estimator: starts from the DC row, scores candidate
/// frequencies through per-delay structure dictionaries, and adds every row
/// of the winning dictionary word (union over delays). Words already fully
/// inside the support are skipped so the residual keeps shrinking.
RecoveryState hades_estimate(const DelayProductMatrix& undersampled,
                             const MeasurementOperator& op, int n_iter,
                             std::span<const StructureDictionary> dictionaries);

/// Least-squares recovery on a fixed (known) support; the "oracle" variant
/// of the greedy estimators.
RecoveryState oracle_estimate(const DelayProductMatrix& undersampled,
                              const MeasurementOperator& op,
                              std::span<const int> support);

/// First non-DC support index folded into {1 .. n/2}; nullopt when the
/// support holds nothing beyond DC (callers treat that as an H0 verdict).
std::optional<int> primary_cycle_frequency(const RecoveryState& state, int n);

}  // namespace cyclosense
