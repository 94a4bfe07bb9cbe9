#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "cyclosense/rng.hpp"
#include "cyclosense/sampling.hpp"

using namespace cyclosense;

namespace {

cvec random_signal(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  cvec x(n);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  return x;
}

SensingConfig make_cfg(int n, int m, double c_r,
                       std::vector<int> delays = {1, 2, 3, 4}) {
  SensingConfig cfg;
  cfg.n = n;
  cfg.m_avail = m;
  cfg.delays = std::move(delays);
  cfg.c_r = c_r;
  return cfg;
}

}  // namespace

TEST_CASE("mask construction rule") {
  const SamplingMask small = build_mask(make_cfg(8, 4, 0.5, {1}), 3);
  REQUIRE(small.size() == 4);
  CHECK(small.consecutive_count == 2);
  CHECK(small.indices[0] == 0);
  CHECK(small.indices[1] == 1);
  for (int i = 2; i < 4; ++i) {
    CHECK(small.indices[i] >= 2);
    CHECK(small.indices[i] <= 7);
  }
  CHECK(small.indices[2] < small.indices[3]);

  CHECK(build_mask(make_cfg(4000, 1000, 0.01), 1).consecutive_count == 10);

  const SamplingMask table1 = build_mask(make_cfg(4000, 1000, 0.15), 1);
  CHECK(table1.consecutive_count == 150);
  CHECK(table1.size() == 1000);
}

TEST_CASE("mask determinism and validation") {
  const SensingConfig cfg = make_cfg(256, 64, 0.2);
  const SamplingMask a = build_mask(cfg, 99);
  const SamplingMask b = build_mask(cfg, 99);
  CHECK(a.indices == b.indices);

  CHECK_THROWS_AS(build_mask(make_cfg(16, 32, 0.2, {1}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_mask(make_cfg(16, 8, 0.6, {1}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_mask(make_cfg(16, 8, 0.2, {}), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_mask(make_cfg(16, 8, 0.2, {1, 1}), 1),
                  std::invalid_argument);
}

TEST_CASE("mask indices are sorted and distinct") {
  RandomSource rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 32 + static_cast<int>(rng.uniform_index(512));
    const int m = 1 + static_cast<int>(rng.uniform_index(n));
    const double c_r = 0.01 + 0.49 * rng.uniform();
    const SamplingMask mask =
        build_mask(make_cfg(n, m, c_r, {1}), mix_seed(6, trial));
    REQUIRE(mask.size() == m);
    std::set<int> seen;
    int prev = -1;
    for (int idx : mask.indices) {
      CHECK(idx > prev);
      prev = idx;
      seen.insert(idx);
      CHECK(idx >= 0);
      CHECK(idx < n);
    }
    CHECK(static_cast<int>(seen.size()) == m);
    for (int i = 0; i < mask.consecutive_count; ++i)
      CHECK(mask.indices[i] == i);
  }
}

TEST_CASE("undersample gathers rows in mask order") {
  const cvec x = random_signal(64, 17);
  const std::vector<int> delays = {1, 3};
  const DelayProductMatrix full = delay_product_matrix(x, delays);

  SUBCASE("full mask is the identity") {
    SensingConfig cfg = make_cfg(64, 64, 0.1, delays);
    const SamplingMask mask = build_mask(cfg, 1);
    const DelayProductMatrix out = undersample(full, mask);
    CHECK(out.columns == full.columns);
  }

  SUBCASE("random mask matches a gather loop") {
    SensingConfig cfg = make_cfg(64, 20, 0.2, delays);
    const SamplingMask mask = build_mask(cfg, 2);
    const DelayProductMatrix out = undersample(full, mask);
    for (std::size_t l = 0; l < delays.size(); ++l) {
      for (int i = 0; i < 20; ++i) {
        CHECK(out.columns[l][i] ==
              full.columns[l][static_cast<std::size_t>(mask.indices[i])]);
      }
    }
    CHECK(out.full_size == 64);
  }

  SUBCASE("mismatched sizes are rejected") {
    SensingConfig cfg = make_cfg(32, 8, 0.2, delays);
    const SamplingMask mask = build_mask(cfg, 3);
    CHECK_THROWS_AS(undersample(full, mask), std::invalid_argument);
  }
}

TEST_CASE("operator image equals the undersampled delay products") {
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 256;
    const cvec x = random_signal(n, mix_seed(400, trial));
    const std::vector<int> delays = {1, 2, 3, 4};
    SensingConfig cfg = make_cfg(n, 96, 0.15, delays);
    const SamplingMask mask = build_mask(cfg, mix_seed(401, trial));
    const MeasurementOperator op(mask, delays);
    const DelayProductMatrix direct =
        undersample(delay_product_matrix(x, delays), mask);
    const DelayProductMatrix image = op.apply(classical_ca(x, delays));
    for (std::size_t l = 0; l < delays.size(); ++l) {
      double scale = 0.0;
      for (const auto& v : direct.columns[l])
        scale = std::max(scale, std::abs(v));
      for (int i = 0; i < direct.rows(); ++i) {
        CHECK(std::abs(direct.columns[l][i] - image.columns[l][i]) <=
              1e-9 * scale);
      }
    }
  }
}

TEST_CASE("atoms are unit-modulus columns of the inverse transform") {
  SensingConfig cfg = make_cfg(64, 24, 0.2, {1});
  const SamplingMask mask = build_mask(cfg, 9);
  const MeasurementOperator op(mask, {1});
  for (int j : {0, 1, 31, 63}) {
    const cvec atom = op.atom(j);
    REQUIRE(static_cast<int>(atom.size()) == op.m());
    double norm = 0.0;
    for (const auto& v : atom) {
      CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
      norm += std::norm(v);
    }
    CHECK(std::sqrt(norm) ==
          doctest::Approx(std::sqrt(static_cast<double>(op.m())))
              .epsilon(1e-12));
  }
  CHECK_THROWS_AS(op.atom(64), std::invalid_argument);
}

TEST_CASE("adjoint identity of the correlation path") {
  // <A c, r> == <c, A^H r> per delay, with A^H r realized as the
  // phase-corrected scatter spectrum.
  const int n = 128;
  const std::vector<int> delays = {1, 3};
  SensingConfig cfg = make_cfg(n, 48, 0.1, delays);
  const SamplingMask mask = build_mask(cfg, 12);
  const MeasurementOperator op(mask, delays);

  CaMatrix c;
  c.n = n;
  c.delays = delays;
  c.columns = {random_signal(n, 71), random_signal(n, 72)};
  const DelayProductMatrix image = op.apply(c);

  for (std::size_t l = 0; l < delays.size(); ++l) {
    const cvec r = random_signal(static_cast<std::size_t>(op.m()), 80 + l);
    const cvec spectrum = op.scatter_spectrum(r);
    cplx lhs{0.0, 0.0};
    for (int i = 0; i < op.m(); ++i)
      lhs += std::conj(image.columns[l][i]) * r[i];
    cplx rhs{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      const cplx adj = std::conj(op.column_phase(k, delays[l])) *
                       spectrum[static_cast<std::size_t>(k)];
      rhs += std::conj(c.columns[l][static_cast<std::size_t>(k)]) * adj;
    }
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs)));
  }
}
