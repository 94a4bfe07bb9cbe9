#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cyclosense/caf.hpp"
#include "cyclosense/dictionary.hpp"

using namespace cyclosense;

namespace {

std::vector<std::vector<double>> dense(const StructureDictionary& dict) {
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(dict.n),
      std::vector<double>(static_cast<std::size_t>(dict.n_columns()), 0.0));
  for (int j = 1; j <= dict.n_columns(); ++j) {
    for (const auto& [row, value] : dict.column(j)) {
      out[static_cast<std::size_t>(row)][static_cast<std::size_t>(j - 1)] =
          value;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("symmetry dictionary reproduces the six-point example") {
  const auto d = dense(build_symmetry_dictionary(6));
  const std::vector<std::vector<double>> want = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  CHECK(d == want);
}

TEST_CASE("symmetry dictionary Nyquist column is a single entry") {
  const StructureDictionary dict = build_symmetry_dictionary(4);
  CHECK(dict.column(2).size() == 1);
  CHECK(dict.column(2).front().first == 2);
}

TEST_CASE("symmetry column sums") {
  const StructureDictionary dict = build_symmetry_dictionary(32);
  for (int j = 1; j <= 16; ++j) {
    double sum = 0.0;
    for (const auto& [row, value] : dict.column(j)) sum += value;
    CHECK(sum == doctest::Approx(j == 16 ? 1.0 : 2.0));
  }
}

TEST_CASE("symmetry dictionary rejects odd sizes") {
  CHECK_THROWS_AS(build_symmetry_dictionary(7), std::invalid_argument);
  CHECK_THROWS_AS(build_symmetry_dictionary(2), std::invalid_argument);
}

TEST_CASE("asymptotic dictionary support and normalization") {
  const int n = 64;
  const int delay = 1;
  const StructureDictionary dict = build_asymptotic_dictionary(n, delay, 1.0);
  REQUIRE(dict.n_columns() == 32);

  for (int j = 1; j <= 32; ++j) {
    double l1 = 0.0;
    for (const auto& [row, value] : dict.column(j)) {
      CHECK(row != 0);
      CHECK(value > 0.0);
      // Rows sit on multiples of j or their mirrors.
      const int wrapped = std::abs(wrapped_frequency(row, n));
      CHECK(wrapped % j == 0);
      l1 += value;
    }
    if (!dict.column(j).empty()) {
      CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("asymptotic column matches the closed-form vector") {
  const int n = 64;
  const int j = 8;
  const int delay = 1;
  const StructureDictionary dict = build_asymptotic_dictionary(n, delay, 1.0);
  const SignalModel model = SignalModel::bpsk(n / j);
  const cvec v = asymptotic_ca_vector(model, n, delay);

  double l1 = 0.0;
  for (int k = 1; k < n; ++k) l1 += std::abs(v[static_cast<std::size_t>(k)]);
  std::vector<double> want(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k < n; ++k)
    want[static_cast<std::size_t>(k)] =
        std::abs(v[static_cast<std::size_t>(k)]) / l1;

  std::vector<double> got(static_cast<std::size_t>(n), 0.0);
  for (const auto& [row, value] : dict.column(j))
    got[static_cast<std::size_t>(row)] = value;
  for (int k = 0; k < n; ++k) {
    CHECK(got[static_cast<std::size_t>(k)] ==
          doctest::Approx(want[static_cast<std::size_t>(k)]).epsilon(1e-10));
  }
}

TEST_CASE("asymptotic columns beyond the pulse overlap stay empty") {
  // Candidate j = 8 on n = 16 means a two-sample symbol; a delay of 4
  // exceeds it, so the column carries no pattern.
  const StructureDictionary dict = build_asymptotic_dictionary(16, 4, 1.0);
  CHECK(dict.column(8).empty());
  CHECK_FALSE(dict.column(1).empty());
}

TEST_CASE("asymptotic dictionary validation") {
  CHECK_THROWS_AS(build_asymptotic_dictionary(15, 1, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_asymptotic_dictionary(16, -1, 1.0),
                  std::invalid_argument);
}
