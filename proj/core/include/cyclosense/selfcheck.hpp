#pragma once

#include <span>
#include <string>
#include <vector>

#include "cyclosense/fft.hpp"

namespace cyclosense::selfcheck {

/// Reference implementations that deliberately avoid the production code
/// paths (no FFT, no closed forms, no boost). They back the `verify` CLI
/// subcommand and the test suites' cross-checks.

/// Direct evaluation of the classical CA estimator as a plain sum,
/// including the wrapped-frequency phase factor.
cplx direct_classical_ca(std::span<const cplx> x, int k, int d);

/// Truncated aliasing-sum evaluation of the sampled rectangular-pulse CA:
/// the infinite alias sum with the continuous-time CA inserted, cut at
/// |l| <= terms. Converges like an alternating series in the tail.
cplx aliasing_sum_ca(int k, int d, int n_sym, int n, double sigma_a2,
                     double d_phi, long terms);

/// |sum_{l=-L..L} (-1)^l / (k/n + l)  -  pi / sin(pi k / n)| for 0 < k < n.
double series_identity_residual(int k, int n, long terms);

/// Upper-tail chi-squared quantile obtained by adaptive Simpson integration
/// of the density plus bisection; independent of the production quantile.
double chi2_quantile_by_integration(double pfa, int dof);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // observed error / residual
  double bound = 0.0;  // tolerance it was held against
};

/// Cross-checks production estimators against the reference oracles:
/// classical CA vs direct sums, closed-form asymptotic CA vs the aliasing
/// sum, the series identity, chi-squared quantiles, and the undersampling
/// round-trip identity.
std::vector<CheckResult> run_selfchecks(std::uint64_t seed);

}  // namespace cyclosense::selfcheck
