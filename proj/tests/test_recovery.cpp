#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "cyclosense/recovery.hpp"
#include "cyclosense/rng.hpp"
#include "cyclosense/signal.hpp"

using namespace cyclosense;

namespace {

SensingConfig make_cfg(int n, int m, double c_r,
                       std::vector<int> delays = {1, 2, 3, 4}) {
  SensingConfig cfg;
  cfg.n = n;
  cfg.m_avail = m;
  cfg.delays = std::move(delays);
  cfg.c_r = c_r;
  return cfg;
}

/// Synthetic jointly-sparse CA with the given support rows.
CaMatrix sparse_ca(int n, const std::vector<int>& delays,
                   const std::vector<int>& support, std::uint64_t seed) {
  RandomSource rng(seed);
  CaMatrix ca;
  ca.n = n;
  ca.delays = delays;
  ca.columns.assign(delays.size(), cvec(static_cast<std::size_t>(n)));
  for (auto& col : ca.columns) {
    for (int row : support) {
      col[static_cast<std::size_t>(row)] = {rng.gaussian(), rng.gaussian()};
    }
  }
  return ca;
}

struct Instance {
  SamplingMask mask;
  MeasurementOperator op;
  DelayProductMatrix pu;
};

Instance synthetic_instance(const SensingConfig& cfg, const CaMatrix& ca,
                            std::uint64_t seed) {
  SamplingMask mask = build_mask(cfg, seed);
  MeasurementOperator op(mask, cfg.delays);
  DelayProductMatrix pu = op.apply(ca);
  return {std::move(mask), std::move(op), std::move(pu)};
}

double estimate_error(const CaMatrix& got, const CaMatrix& want) {
  double err = 0.0;
  for (int l = 0; l < want.n_delays(); ++l) {
    for (int k = 0; k < want.n; ++k) {
      err = std::max(err, std::abs(got.at(k, l) - want.at(k, l)));
    }
  }
  return err;
}

}  // namespace

TEST_CASE("one-sparse CA is recovered exactly in a single iteration") {
  const SensingConfig cfg = make_cfg(64, 24, 0.2);
  const CaMatrix truth = sparse_ca(64, cfg.delays, {7}, 5);
  const Instance inst = synthetic_instance(cfg, truth, 6);

  const RecoveryState state = somp_estimate(inst.pu, inst.op, 1);
  REQUIRE(state.support == std::vector<int>{7});
  CHECK(estimate_error(state.estimate, truth) < 1e-9);
  CHECK_FALSE(state.rank_deficient);

  const RecoveryState omp = omp_estimate(inst.pu, inst.op, 1);
  CHECK(omp.support == std::vector<int>{7});
  CHECK(estimate_error(omp.estimate, truth) < 1e-9);
}

TEST_CASE("iteration count must be positive") {
  const SensingConfig cfg = make_cfg(32, 16, 0.2, {1});
  const CaMatrix truth = sparse_ca(32, cfg.delays, {3}, 1);
  const Instance inst = synthetic_instance(cfg, truth, 2);
  CHECK_THROWS_AS(somp_estimate(inst.pu, inst.op, 0), std::invalid_argument);
  CHECK_THROWS_AS(omp_estimate(inst.pu, inst.op, 0), std::invalid_argument);
}

TEST_CASE("simultaneous recovery finds every harmonic of a clean signal") {
  const SignalModel model = SignalModel::bpsk(8);
  const SensingConfig cfg = make_cfg(256, 128, 0.15);
  const SampleRecord record = generate_signal(model, 256, 99);
  const SamplingMask mask = build_mask(cfg, 100);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);

  const RecoveryState state = somp_estimate(pu, op, 64);
  const std::set<int> support(state.support.begin(), state.support.end());
  for (int m = 1; m < 8; ++m) {
    CHECK(support.count(m * 32) == 1);
  }
}

TEST_CASE("plain OMP with one delay equals the joint algorithm") {
  const SensingConfig cfg = make_cfg(96, 40, 0.1, {2});
  const CaMatrix truth = sparse_ca(96, cfg.delays, {5, 17, 91}, 11);
  const Instance inst = synthetic_instance(cfg, truth, 12);
  const RecoveryState joint = somp_estimate(inst.pu, inst.op, 3);
  const RecoveryState single = omp_estimate(inst.pu, inst.op, 3);
  CHECK(joint.support == single.support);
  CHECK(estimate_error(joint.estimate, single.estimate) < 1e-12);
}

TEST_CASE("plain OMP decomposes into independent per-delay runs") {
  const SensingConfig cfg = make_cfg(64, 32, 0.2, {1, 2, 3});
  // Per-delay supports are shared here, but the decomposition must hold
  // regardless; use noisy data so the picks are nontrivial.
  RandomSource rng(55);
  cvec x(64);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  const SamplingMask mask = build_mask(cfg, 56);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(x, cfg.delays), mask);

  const RecoveryState full = omp_estimate(pu, op, 4);
  for (std::size_t l = 0; l < cfg.delays.size(); ++l) {
    SensingConfig sub_cfg = make_cfg(64, 32, 0.2, {cfg.delays[l]});
    const MeasurementOperator sub_op(mask, sub_cfg.delays);
    DelayProductMatrix sub_pu;
    sub_pu.full_size = pu.full_size;
    sub_pu.delays = {cfg.delays[l]};
    sub_pu.columns = {pu.columns[l]};
    const RecoveryState solo = somp_estimate(sub_pu, sub_op, 4);
    CHECK(full.column_supports[l] == solo.support);
  }
}

TEST_CASE("full-rank measurements recover any jointly sparse CA exactly") {
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 32;
    const SensingConfig cfg = make_cfg(n, n, 0.2, {1, 2});
    RandomSource rng(mix_seed(800, trial));
    std::vector<int> support;
    std::set<int> used;
    const int sparsity = 4;
    while (static_cast<int>(support.size()) < sparsity) {
      const int row = static_cast<int>(rng.uniform_index(n));
      if (used.insert(row).second) support.push_back(row);
    }
    const CaMatrix truth =
        sparse_ca(n, cfg.delays, support, mix_seed(801, trial));
    const Instance inst =
        synthetic_instance(cfg, truth, mix_seed(802, trial));
    const RecoveryState state = somp_estimate(inst.pu, inst.op, sparsity);
    CHECK(estimate_error(state.estimate, truth) < 1e-9);
    for (double norm : state.residual_norms) CHECK(norm < 1e-9);
  }
}

TEST_CASE("residual norms never increase and supports never repeat") {
  const SignalModel model = SignalModel::bpsk(8);
  const SensingConfig cfg = make_cfg(128, 64, 0.2);
  const SampleRecord record =
      add_awgn(generate_signal(model, 128, 301), 0.0, 302);
  const SamplingMask mask = build_mask(cfg, 303);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);

  std::vector<StructureDictionary> sym(cfg.delays.size(),
                                       build_symmetry_dictionary(128));
  std::vector<StructureDictionary> asy;
  for (int d : cfg.delays)
    asy.push_back(build_asymptotic_dictionary(128, d, 1.0));

  const RecoveryState states[] = {
      somp_estimate(pu, op, 10), omp_estimate(pu, op, 10),
      hades_estimate(pu, op, 4, sym), hades_estimate(pu, op, 4, asy)};
  for (const RecoveryState& state : states) {
    for (const auto& history : state.residual_history) {
      for (std::size_t i = 1; i < history.size(); ++i) {
        CHECK(history[i] <= history[i - 1] * (1.0 + 1e-12));
      }
    }
    const std::set<int> unique(state.support.begin(), state.support.end());
    CHECK(unique.size() == state.support.size());
    for (const auto& cols : state.column_supports) {
      const std::set<int> u(cols.begin(), cols.end());
      CHECK(u.size() == cols.size());
    }
  }

  // One support index per iteration for the joint algorithm, per column
  // for the per-delay baseline.
  const RecoveryState joint = somp_estimate(pu, op, 10);
  CHECK(static_cast<int>(joint.support.size()) == joint.iterations_run);
  const RecoveryState per_delay = omp_estimate(pu, op, 10);
  for (const auto& cols : per_delay.column_supports) {
    CHECK(static_cast<int>(cols.size()) == per_delay.iterations_run);
  }
}

TEST_CASE("support selection is invariant under positive scaling") {
  const SignalModel model = SignalModel::bpsk(8);
  const SensingConfig cfg = make_cfg(128, 48, 0.15);
  const SampleRecord record =
      add_awgn(generate_signal(model, 128, 501), 2.0, 502);
  const SamplingMask mask = build_mask(cfg, 503);
  const MeasurementOperator op(mask, cfg.delays);
  DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);
  DelayProductMatrix scaled = pu;
  for (auto& col : scaled.columns) {
    for (auto& v : col) v *= 3.7;
  }
  std::vector<StructureDictionary> sym(cfg.delays.size(),
                                       build_symmetry_dictionary(128));

  CHECK(somp_estimate(pu, op, 6).support ==
        somp_estimate(scaled, op, 6).support);
  CHECK(omp_estimate(pu, op, 6).support ==
        omp_estimate(scaled, op, 6).support);
  CHECK(hades_estimate(pu, op, 3, sym).support ==
        hades_estimate(scaled, op, 3, sym).support);
}

TEST_CASE("dependent atoms flag the state and fall back to a stable solve") {
  // A single-row mask makes every pair of atoms linearly dependent.
  SensingConfig cfg = make_cfg(16, 1, 0.5, {1});
  const SamplingMask mask = build_mask(cfg, 1);
  const MeasurementOperator op(mask, cfg.delays);
  DelayProductMatrix pu;
  pu.full_size = 16;
  pu.delays = {1};
  pu.columns = {cvec{cplx{1.0, 0.5}}};

  const RecoveryState state = oracle_estimate(pu, op, std::vector<int>{0, 5});
  CHECK(state.rank_deficient);
  for (int l = 0; l < state.estimate.n_delays(); ++l) {
    for (int k = 0; k < 16; ++k) {
      CHECK(std::isfinite(state.estimate.at(k, l).real()));
      CHECK(std::isfinite(state.estimate.at(k, l).imag()));
    }
  }
  CHECK(state.residual_norms[0] < 1e-9);
}

TEST_CASE("hades recovers a conjugate-symmetric pair in one iteration") {
  const int n = 64;
  const SensingConfig cfg = make_cfg(n, 32, 0.2, {1, 2});
  RandomSource rng(21);
  CaMatrix truth;
  truth.n = n;
  truth.delays = cfg.delays;
  truth.columns.assign(2, cvec(static_cast<std::size_t>(n)));
  for (auto& col : truth.columns) {
    const cplx v{rng.gaussian(), rng.gaussian()};
    col[9] = v;
    col[n - 9] = std::conj(v);
  }
  const Instance inst = synthetic_instance(cfg, truth, 22);
  std::vector<StructureDictionary> sym(cfg.delays.size(),
                                       build_symmetry_dictionary(n));
  const RecoveryState state = hades_estimate(inst.pu, inst.op, 1, sym);

  // One word adds at most DC plus the mirrored pair.
  CHECK(state.support.size() <= 3);
  CHECK(state.support[0] == 0);
  CHECK(std::count(state.support.begin(), state.support.end(), 9) == 1);
  CHECK(std::count(state.support.begin(), state.support.end(), n - 9) == 1);
  CHECK(estimate_error(state.estimate, truth) < 1e-9);
}

TEST_CASE("hades skips words that add nothing new") {
  const int n = 64;
  const SensingConfig cfg = make_cfg(n, 32, 0.2, {1});
  const CaMatrix truth = sparse_ca(n, cfg.delays, {9, n - 9}, 31);
  const Instance inst = synthetic_instance(cfg, truth, 32);
  std::vector<StructureDictionary> sym(cfg.delays.size(),
                                       build_symmetry_dictionary(n));
  const RecoveryState state = hades_estimate(inst.pu, inst.op, 3, sym);
  const std::set<int> unique(state.support.begin(), state.support.end());
  CHECK(unique.size() == state.support.size());
  // Each further iteration adds a fresh pair at most.
  CHECK(state.support.size() <= 1 + 2 * 3);
}

TEST_CASE("hades with asymptotic dictionaries captures the harmonic family") {
  const SignalModel model = SignalModel::bpsk(8);
  const int n = 256;
  const SensingConfig cfg = make_cfg(n, 128, 0.15);
  const SampleRecord record = generate_signal(model, n, 601);
  const SamplingMask mask = build_mask(cfg, 602);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);
  std::vector<StructureDictionary> asy;
  for (int d : cfg.delays)
    asy.push_back(build_asymptotic_dictionary(n, d, 1.0));

  const RecoveryState state = hades_estimate(pu, op, 1, asy);
  const std::set<int> support(state.support.begin(), state.support.end());
  CHECK(support.count(0) == 1);
  for (int m = 1; m < 8; ++m) CHECK(support.count(m * 32) == 1);
}

TEST_CASE("hades validates its dictionaries") {
  const SensingConfig cfg = make_cfg(64, 32, 0.2, {1, 2});
  const CaMatrix truth = sparse_ca(64, cfg.delays, {5}, 41);
  const Instance inst = synthetic_instance(cfg, truth, 42);
  std::vector<StructureDictionary> one(1, build_symmetry_dictionary(64));
  CHECK_THROWS_AS(hades_estimate(inst.pu, inst.op, 1, one),
                  std::invalid_argument);
  std::vector<StructureDictionary> wrong_delay = {
      build_asymptotic_dictionary(64, 1, 1.0),
      build_asymptotic_dictionary(64, 3, 1.0)};
  CHECK_THROWS_AS(hades_estimate(inst.pu, inst.op, 1, wrong_delay),
                  std::invalid_argument);
}

TEST_CASE("primary cycle frequency folds the first non-DC index") {
  RecoveryState state;
  state.support = {0, 500, 3500};
  CHECK(primary_cycle_frequency(state, 4000) == 500);

  state.support = {96};
  CHECK(primary_cycle_frequency(state, 256) == 96);

  state.support = {0, 3500};
  CHECK(primary_cycle_frequency(state, 4000) == 500);

  state.support = {0};
  CHECK_FALSE(primary_cycle_frequency(state, 4000).has_value());
  state.support = {};
  CHECK_FALSE(primary_cycle_frequency(state, 4000).has_value());
}

TEST_CASE("oracle recovery on the true support nails a clean signal") {
  const SignalModel model = SignalModel::bpsk(8);
  const int n = 256;
  const SensingConfig cfg = make_cfg(n, 128, 0.15);
  const SampleRecord record = generate_signal(model, n, 701);
  const SamplingMask mask = build_mask(cfg, 702);
  const MeasurementOperator op(mask, cfg.delays);
  const DelayProductMatrix pu =
      undersample(delay_product_matrix(record.samples, cfg.delays), mask);
  std::vector<int> support = {0};
  for (int m = 1; m < 8; ++m) support.push_back(m * 32);
  const RecoveryState state = oracle_estimate(pu, op, support);
  CHECK(state.support == support);
  CHECK_THROWS_AS(oracle_estimate(pu, op, std::vector<int>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle_estimate(pu, op, std::vector<int>{1, 1}),
                  std::invalid_argument);
}
