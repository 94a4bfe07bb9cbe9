#pragma once

#include <limits>
#include <vector>

#include "cyclosense/caf.hpp"
#include "cyclosense/recovery.hpp"
#include "cyclosense/sampling.hpp"
#include "cyclosense/window.hpp"

namespace cyclosense {

enum class Verdict { kH0, kH1 };

/// Real symmetric covariance estimate of the scaled test vector
/// sqrt(n) * [Re c(k, d_1..d_M), Im c(k, d_1..d_M)].
struct CovarianceEstimate {
  int dim = 0;                 // 2 * number of delays
  std::vector<double> matrix;  // row-major dim x dim
  int window_length = 0;
  int source_size = 0;  // CA size it was estimated from
  /// Sample-equivalent count of the smoother; zero marks an exact (known)
  /// covariance, in which case the quadratic form is used as is.
  double effective_dof = 0.0;

  double& at(int r, int c) { return matrix[static_cast<std::size_t>(r * dim + c)]; }
  double at(int r, int c) const {
    return matrix[static_cast<std::size_t>(r * dim + c)];
  }
};

struct TestResult {
  double statistic = 0.0;
  int k_test = 0;
  int dof = 0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  double pfa = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::kH0;
  bool regularized = false;
  /// Set when sparse recovery produced no non-DC support and the test was
  /// short-circuited to an H0 verdict.
  bool no_cycle_frequency = false;
};

/// Frequency-smoothed cyclic spectrum estimate from a CA matrix, for the
/// delay pair (m_index, n_index) at test frequency k. The unconjugated
/// variant multiplies rows k-s and k+s, the conjugated one correlates row
/// k+s with itself; row indices wrap modulo the CA size.
cplx smoothed_cyclic_spectrum(const CaMatrix& ca, int k, int m_index,
                              int n_index, bool conjugated,
                              const SpectralWindow& window);

/// Concatenated real/imaginary parts of CA row k.
std::vector<double> test_vector(const CaMatrix& ca, int k);

CovarianceEstimate estimate_covariance(const CaMatrix& ca, int k_test,
                                       const SpectralWindow& window);

/// Quadratic-form statistic T = scale * r Cov^-1 r^T. Near-singular
/// covariances are diagonally loaded and flagged.
TestResult quadratic_form_statistic(const std::vector<double>& r,
                                    const CovarianceEstimate& cov,
                                    double scale);

/// Classical time-domain test statistic at a known cycle frequency
/// (threshold left unset; apply `decide`).
TestResult tdt_statistic(const CaMatrix& ca, int k_test,
                         const SpectralWindow& window);

/// Sparse-recovery variant: covariance comes from the classical CA of the
/// consecutive delay-product prefix, mapped to the small frequency grid and
/// rescaled by sqrt(c_r * m / n); the test vector comes from the sparse
/// estimate at the recovered cycle frequency.
TestResult sparse_tdt_statistic(const DelayProductMatrix& undersampled,
                                const SamplingMask& mask,
                                const RecoveryState& state,
                                const SensingConfig& cfg,
                                const SpectralWindow& window);

/// Covariance rescaling divisor sqrt(c_r * m / n) of the sparse test.
double sparse_covariance_divisor(const SensingConfig& cfg);

/// Upper-tail chi-squared quantile: P(X > t) = pfa for X ~ chi2(dof).
double chi2_threshold(double pfa, int dof);

/// Fills threshold/pfa and sets the verdict (H1 iff statistic strictly
/// exceeds the threshold; short-circuited results stay H0).
TestResult decide(TestResult result, double pfa);

}  // namespace cyclosense
