#pragma once

#include <utility>
#include <vector>

#include "cyclosense/caf.hpp"

namespace cyclosense {

enum class DictionaryKind { kSymmetry, kAsymptotic };

/// Nonnegative n x (n/2) pattern matrix whose column j (candidate discrete
/// cycle frequency, 1-based up to n/2) marks the CA rows implied by that
/// frequency. Stored sparsely: columns hold (row, weight) pairs. The DC row
/// is zero in every column.
struct StructureDictionary {
  int n = 0;
  DictionaryKind kind = DictionaryKind::kSymmetry;
  int delay = 0;  // the delay an asymptotic dictionary serves; 0 for symmetry
  std::vector<std::vector<std::pair<int, double>>> columns;

  int n_columns() const { return static_cast<int>(columns.size()); }

  /// Column for candidate frequency j in {1 .. n/2}.
  const std::vector<std::pair<int, double>>& column(int j) const;
};

/// Mirror-pair dictionary: column j has unit weight at rows j and n - j
/// (a single entry at the Nyquist row). n must be even and >= 4.
StructureDictionary build_symmetry_dictionary(int n);

/// Closed-form shape dictionary: column j is the magnitude of the
/// asymptotic CA vector for symbol length n / j at the given delay,
/// DC forced to zero, l1-normalized. Columns whose symbol length does not
/// exceed the delay have no pulse overlap and stay empty.
StructureDictionary build_asymptotic_dictionary(int n, int delay,
                                                double sigma_a2);

}  // namespace cyclosense
