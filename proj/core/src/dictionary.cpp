#include "cyclosense/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cyclosense {

const std::vector<std::pair<int, double>>& StructureDictionary::column(
    int j) const {
  if (j < 1 || j > n_columns())
    throw std::invalid_argument("StructureDictionary: column out of range");
  return columns[static_cast<std::size_t>(j - 1)];
}

StructureDictionary build_symmetry_dictionary(int n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument(
        "build_symmetry_dictionary: n must be even and >= 4");
  StructureDictionary dict;
  dict.n = n;
  dict.kind = DictionaryKind::kSymmetry;
  dict.columns.resize(static_cast<std::size_t>(n / 2));
  for (int j = 1; j <= n / 2; ++j) {
    auto& col = dict.columns[static_cast<std::size_t>(j - 1)];
    col.emplace_back(j, 1.0);
    if (n - j != j) col.emplace_back(n - j, 1.0);
  }
  return dict;
}

StructureDictionary build_asymptotic_dictionary(int n, int delay,
                                                double sigma_a2) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument(
        "build_asymptotic_dictionary: n must be even and >= 4");
  if (delay < 0)
    throw std::invalid_argument(
        "build_asymptotic_dictionary: delay must be nonnegative");
  StructureDictionary dict;
  dict.n = n;
  dict.kind = DictionaryKind::kAsymptotic;
  dict.delay = delay;
  dict.columns.resize(static_cast<std::size_t>(n / 2));
  for (int j = 1; j <= n / 2; ++j) {
    auto& col = dict.columns[static_cast<std::size_t>(j - 1)];
    const double symbol_len = static_cast<double>(n) / static_cast<double>(j);
    const double d_phi = (symbol_len + 1.0) / 2.0;
    double l1 = 0.0;
    const auto add_row = [&](int row, int k_signed) {
      const double magnitude =
          std::abs(detail::asymptotic_ca_value(k_signed, delay, symbol_len, j,
                                               sigma_a2, d_phi, n));
      if (magnitude > 0.0) {
        col.emplace_back(row, magnitude);
        l1 += magnitude;
      }
    };
    // Harmonics of candidate j sit at rows m*j up to n/2 and at the mirror
    // rows n - m*j above it (DC stays out).
    for (int m = 1; m * j <= n / 2; ++m) {
      add_row(m * j, m * j);
      if (n - m * j > n / 2) add_row(n - m * j, -(m * j));
    }
    if (l1 > 0.0) {
      for (auto& [row, weight] : col) weight /= l1;
    }
    std::sort(col.begin(), col.end());
  }
  return dict;
}

}  // namespace cyclosense
