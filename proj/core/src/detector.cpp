#include "cyclosense/detector.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <stdexcept>

namespace cyclosense {

namespace {

int wrap_row(int k, int n) {
  int r = k % n;
  if (r < 0) r += n;
  return r;
}

/// Gaussian elimination with partial pivoting; returns the solution and a
/// pivot-ratio condition proxy.
bool solve_dense(std::vector<double> a, int dim, std::vector<double> b,
                 std::vector<double>& x, double& cond_proxy) {
  std::vector<int> perm(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) perm[static_cast<std::size_t>(i)] = i;
  double max_piv = 0.0;
  double min_piv = std::numeric_limits<double>::infinity();
  auto at = [&](int r, int c) -> double& {
    return a[static_cast<std::size_t>(r * dim + c)];
  };
  for (int col = 0; col < dim; ++col) {
    int pivot_row = col;
    double pivot_mag = std::abs(at(col, col));
    for (int r = col + 1; r < dim; ++r) {
      if (std::abs(at(r, col)) > pivot_mag) {
        pivot_mag = std::abs(at(r, col));
        pivot_row = r;
      }
    }
    if (pivot_mag == 0.0) {
      cond_proxy = std::numeric_limits<double>::infinity();
      return false;
    }
    if (pivot_row != col) {
      for (int c = 0; c < dim; ++c) std::swap(at(col, c), at(pivot_row, c));
      std::swap(b[static_cast<std::size_t>(col)],
                b[static_cast<std::size_t>(pivot_row)]);
    }
    max_piv = std::max(max_piv, pivot_mag);
    min_piv = std::min(min_piv, pivot_mag);
    for (int r = col + 1; r < dim; ++r) {
      const double f = at(r, col) / at(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < dim; ++c) at(r, c) -= f * at(col, c);
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  x.assign(static_cast<std::size_t>(dim), 0.0);
  for (int r = dim - 1; r >= 0; --r) {
    double v = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < dim; ++c)
      v -= at(r, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = v / at(r, r);
  }
  cond_proxy = max_piv / min_piv;
  return true;
}

}  // namespace

cplx smoothed_cyclic_spectrum(const CaMatrix& ca, int k, int m_index,
                              int n_index, bool conjugated,
                              const SpectralWindow& window) {
  const int n = ca.n;
  const int length = window.length();
  if (length % 2 == 0)
    throw std::invalid_argument("smoothed_cyclic_spectrum: window length even");
  if (length >= n)
    throw std::invalid_argument(
        "smoothed_cyclic_spectrum: window does not fit the CA");
  if (m_index < 0 || m_index >= ca.n_delays() || n_index < 0 ||
      n_index >= ca.n_delays())
    throw std::invalid_argument("smoothed_cyclic_spectrum: bad delay index");
  const int half = window.half();
  cplx acc{0.0, 0.0};
  for (int s = -half; s <= half; ++s) {
    const double w = window.at(s);
    if (conjugated) {
      const cplx v = ca.at(wrap_row(k + s, n), n_index);
      acc += w * std::conj(v) * ca.at(wrap_row(k + s, n), m_index);
    } else {
      acc += w * ca.at(wrap_row(k - s, n), n_index) *
             ca.at(wrap_row(k + s, n), m_index);
    }
  }
  return acc / (static_cast<double>(n) * static_cast<double>(length));
}

std::vector<double> test_vector(const CaMatrix& ca, int k) {
  if (k < 0 || k >= ca.n)
    throw std::invalid_argument("test_vector: row out of range");
  const int n_delays = ca.n_delays();
  std::vector<double> r(static_cast<std::size_t>(2 * n_delays));
  for (int l = 0; l < n_delays; ++l) {
    r[static_cast<std::size_t>(l)] = ca.at(k, l).real();
    r[static_cast<std::size_t>(l + n_delays)] = ca.at(k, l).imag();
  }
  return r;
}

CovarianceEstimate estimate_covariance(const CaMatrix& ca, int k_test,
                                       const SpectralWindow& window) {
  const int n = ca.n;
  const int length = window.length();
  if (length % 2 == 0 || length < 3)
    throw std::invalid_argument(
        "estimate_covariance: window length must be odd and >= 3");
  if (length >= n)
    throw std::invalid_argument(
        "estimate_covariance: window does not fit the CA");
  const int n_delays = ca.n_delays();
  CovarianceEstimate cov;
  cov.dim = 2 * n_delays;
  cov.matrix.assign(static_cast<std::size_t>(cov.dim * cov.dim), 0.0);
  cov.window_length = length;
  cov.source_size = n;

  // Two departures from a literal composition of the smoothed-periodogram
  // formulas, both needed for the chi-squared calibration of the test:
  //  - the periodograms of the normalized CA are scaled back to the
  //    unnormalized delay-product spectra (factor n per CA factor), so the
  //    matrix estimates the covariance of sqrt(n) * r;
  //  - the s = 0 term is left out of the smoother (weights renormalized).
  //    At s = 0 both periodograms reduce to the outer product of the test
  //    vector with itself, which self-normalizes the statistic and thins
  //    its upper tail well below the chi-squared law.
  const int half = window.half();
  double weight_mass = 0.0;
  double weight_power = 0.0;
  for (int s = -half; s <= half; ++s) {
    if (s == 0) continue;
    weight_mass += window.at(s);
    weight_power += window.at(s) * window.at(s);
  }
  const double scale = static_cast<double>(n) / weight_mass;
  for (int m = 0; m < n_delays; ++m) {
    for (int nn = 0; nn < n_delays; ++nn) {
      cplx q{0.0, 0.0};
      cplx qc{0.0, 0.0};
      for (int s = -half; s <= half; ++s) {
        if (s == 0) continue;
        const double w = window.at(s);
        const cplx up = ca.at(wrap_row(k_test + s, n), m);
        q += w * ca.at(wrap_row(k_test - s, n), nn) * up;
        qc += w * std::conj(ca.at(wrap_row(k_test + s, n), nn)) * up;
      }
      q *= scale;
      qc *= scale;
      cov.at(m, nn) = 0.5 * (q + qc).real();
      cov.at(m, nn + n_delays) = 0.5 * (q - qc).imag();
      cov.at(m + n_delays, nn) = 0.5 * (q + qc).imag();
      cov.at(m + n_delays, nn + n_delays) = 0.5 * (qc - q).real();
    }
  }

  // Sample-equivalent count of the weighted smoother. Both the Hermitian
  // and the unconjugated (pseudo-covariance) parts are estimated from the
  // same bins, which halves the per-bin information, so the plain
  // weighted-average equivalent is the right count.
  cov.effective_dof = weight_mass * weight_mass / weight_power;
  return cov;
}

TestResult quadratic_form_statistic(const std::vector<double>& r,
                                    const CovarianceEstimate& cov,
                                    double scale) {
  if (static_cast<int>(r.size()) != cov.dim)
    throw std::invalid_argument("quadratic_form_statistic: dimension mismatch");
  TestResult result;
  result.dof = cov.dim;
  double r_norm = 0.0;
  for (double v : r) r_norm += v * v;
  if (r_norm == 0.0) return result;

  constexpr double kCondLimit = 1e12;
  std::vector<double> x;
  double cond = 0.0;
  bool ok = solve_dense(cov.matrix, cov.dim, r, x, cond);
  if (!ok || cond > kCondLimit) {
    double trace = 0.0;
    for (int i = 0; i < cov.dim; ++i) trace += cov.at(i, i);
    if (trace <= 0.0)
      throw std::runtime_error(
          "quadratic_form_statistic: covariance is not usable");
    std::vector<double> loaded = cov.matrix;
    const double delta = 1e-8 * trace / static_cast<double>(cov.dim);
    for (int i = 0; i < cov.dim; ++i)
      loaded[static_cast<std::size_t>(i * cov.dim + i)] += delta;
    ok = solve_dense(loaded, cov.dim, r, x, cond);
    if (!ok)
      throw std::runtime_error(
          "quadratic_form_statistic: covariance is not usable");
    result.regularized = true;
  }
  double t = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) t += r[i] * x[i];
  result.statistic = std::max(0.0, scale * t);

  // An estimated covariance makes the raw quadratic form Hotelling-like
  // rather than chi-squared; with nu sample-equivalents in the estimate,
  // (nu - p + 1) / (nu p) * T follows an F(p, nu - p + 1) law. Mapping
  // through that law back onto the chi-squared scale keeps the tabulated
  // thresholds honest down to small smoothing windows.
  const double nu = cov.effective_dof;
  const double p = static_cast<double>(cov.dim);
  if (nu > p + 1.0 && result.statistic > 0.0) {
    const boost::math::fisher_f_distribution<double> f_law(p, nu - p + 1.0);
    const boost::math::chi_squared_distribution<double> chi_law(p);
    const double w = result.statistic * (nu - p + 1.0) / (nu * p);
    double tail = boost::math::cdf(boost::math::complement(f_law, w));
    tail = std::max(tail, 1e-290);
    result.statistic =
        boost::math::quantile(boost::math::complement(chi_law, tail));
  }
  return result;
}

TestResult tdt_statistic(const CaMatrix& ca, int k_test,
                         const SpectralWindow& window) {
  const std::vector<double> r = test_vector(ca, k_test);
  const CovarianceEstimate cov = estimate_covariance(ca, k_test, window);
  TestResult result =
      quadratic_form_statistic(r, cov, static_cast<double>(ca.n));
  result.k_test = k_test;
  return result;
}

double sparse_covariance_divisor(const SensingConfig& cfg) {
  return std::sqrt(cfg.c_r * static_cast<double>(cfg.m_avail) /
                   static_cast<double>(cfg.n));
}

TestResult sparse_tdt_statistic(const DelayProductMatrix& undersampled,
                                const SamplingMask& mask,
                                const RecoveryState& state,
                                const SensingConfig& cfg,
                                const SpectralWindow& window) {
  const int n_c = cfg.consecutive_count();
  if (mask.consecutive_count != n_c || mask.n != cfg.n ||
      mask.size() != cfg.m_avail)
    throw std::invalid_argument("sparse_tdt_statistic: mask does not match cfg");
  if (undersampled.rows() != mask.size() ||
      undersampled.full_size != cfg.n)
    throw std::invalid_argument(
        "sparse_tdt_statistic: delay products do not match the mask");
  if (n_c <= window.length())
    throw std::invalid_argument(
        "sparse_tdt_statistic: window does not fit the consecutive block");

  TestResult result;
  result.dof = 2 * undersampled.n_delays();

  const std::optional<int> k_test = primary_cycle_frequency(state, cfg.n);
  if (!k_test) {
    result.no_cycle_frequency = true;
    return result;
  }

  // Classical CA of the consecutive delay-product prefix only.
  DelayProductMatrix block;
  block.full_size = n_c;
  block.delays = undersampled.delays;
  block.columns.reserve(undersampled.columns.size());
  for (const auto& col : undersampled.columns) {
    block.columns.emplace_back(col.begin(), col.begin() + n_c);
  }
  const CaMatrix ca_small = ca_matrix_from_products(block);

  int k_c = static_cast<int>(
      std::ceil(cfg.c_r * static_cast<double>(cfg.m_avail) /
                static_cast<double>(cfg.n) * static_cast<double>(*k_test)));
  k_c = std::max(1, std::min(k_c, n_c - 1));

  CovarianceEstimate cov = estimate_covariance(ca_small, k_c, window);
  const double divisor = sparse_covariance_divisor(cfg);
  for (double& v : cov.matrix) v /= divisor;

  const std::vector<double> r = test_vector(state.estimate, *k_test);
  TestResult quad =
      quadratic_form_statistic(r, cov, static_cast<double>(cfg.n));
  quad.k_test = *k_test;
  return quad;
}

double chi2_threshold(double pfa, int dof) {
  if (!(pfa > 0.0 && pfa < 1.0))
    throw std::domain_error("chi2_threshold: pfa must lie in (0, 1)");
  if (dof < 1) throw std::domain_error("chi2_threshold: dof must be >= 1");
  const boost::math::chi_squared_distribution<double> dist(
      static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, pfa));
}

TestResult decide(TestResult result, double pfa) {
  result.threshold = chi2_threshold(pfa, result.dof);
  result.pfa = pfa;
  result.verdict = (!result.no_cycle_frequency &&
                    result.statistic > result.threshold)
                       ? Verdict::kH1
                       : Verdict::kH0;
  return result;
}

}  // namespace cyclosense
