#include "cyclosense/selfcheck.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cyclosense/caf.hpp"
#include "cyclosense/detector.hpp"
#include "cyclosense/rng.hpp"
#include "cyclosense/sampling.hpp"

namespace cyclosense::selfcheck {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double chi2_density_u(double u, int dof, double log_norm) {
  // Chi-squared density under t = u^2, including the Jacobian 2u; smooth
  // down to u = 0 for dof >= 1.
  if (u <= 0.0) return 0.0;
  const double log_f = (dof - 1) * std::log(u) - 0.5 * u * u + log_norm;
  return 2.0 * std::exp(log_f);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, int dof,
                        double log_norm) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = chi2_density_u(lm, dof, log_norm);
  const double frm = chi2_density_u(rm, dof, log_norm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(a, m, fa, flm, fm, left, tol / 2.0, depth - 1, dof,
                          log_norm) +
         adaptive_simpson(m, b, fm, frm, fb, right, tol / 2.0, depth - 1, dof,
                          log_norm);
}

// P(X <= t) for X ~ chi-squared(dof), via the substitution t = u^2.
double chi2_cdf_by_integration(double t, int dof) {
  if (t <= 0.0) return 0.0;
  const double a = dof / 2.0;
  const double log_norm = -a * std::numbers::ln2 - std::lgamma(a);
  const double hi = std::sqrt(t);
  const double fa = chi2_density_u(0.0, dof, log_norm);
  const double fb = chi2_density_u(hi, dof, log_norm);
  const double fm = chi2_density_u(0.5 * hi, dof, log_norm);
  const double whole = simpson(0.0, hi, fa, fm, fb);
  return adaptive_simpson(0.0, hi, fa, fm, fb, whole, 1e-13, 48, dof,
                          log_norm);
}

}  // namespace

cplx direct_classical_ca(std::span<const cplx> x, int k, int d) {
  const int n = static_cast<int>(x.size());
  if (d < 0 || d >= n) throw std::domain_error("direct_classical_ca: bad d");
  const double kw = static_cast<double>(k <= n / 2 ? k : k - n);
  cplx acc{0.0, 0.0};
  for (int t = 0; t <= n - 1 - d; ++t) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
    acc += x[static_cast<std::size_t>(t)] *
           std::conj(x[static_cast<std::size_t>(t + d)]) *
           std::polar(1.0, angle);
  }
  const cplx phase = std::polar(
      1.0, -std::numbers::pi * kw * static_cast<double>(d) /
               static_cast<double>(n));
  return acc * phase / static_cast<double>(n);
}

cplx aliasing_sum_ca(int k, int d, int n_sym, int n, double sigma_a2,
                     double d_phi, long terms) {
  if (n_sym < 1 || n <= 0 || n % n_sym != 0)
    throw std::invalid_argument("aliasing_sum_ca: n must be a multiple of n_sym");
  const int abs_d = std::abs(d);
  if (abs_d > n_sym)
    throw std::domain_error("aliasing_sum_ca: |d| must not exceed n_sym");
  // Aliases only stack on the harmonics; elsewhere every alias is zero.
  const long long kn = static_cast<long long>(k) * n_sym;
  if (kn % n != 0) return cplx{0.0, 0.0};
  const double width = static_cast<double>(n_sym - abs_d);
  if (width <= 0.0) return cplx{0.0, 0.0};
  const double ratio = static_cast<double>(k) / static_cast<double>(n);

  // l = 0 first, then symmetric pairs in increasing |l| so the alternating
  // tail cancels as it accumulates.
  cplx series{sinc(ratio * width), 0.0};
  for (long l = 1; l <= terms; ++l) {
    const double lp = static_cast<double>(l);
    const cplx alias_phase_pos =
        std::polar(1.0, std::numbers::pi * lp * d +
                            2.0 * std::numbers::pi * lp * d_phi);
    const cplx alias_phase_neg = std::conj(alias_phase_pos);
    const cplx pair = alias_phase_pos * sinc((ratio + lp) * width) +
                      alias_phase_neg * sinc((ratio - lp) * width);
    series += pair;
  }
  const cplx phase =
      std::polar(1.0, 2.0 * std::numbers::pi * ratio * d_phi);
  return sigma_a2 * (width / static_cast<double>(n_sym)) * phase * series;
}

double series_identity_residual(int k, int n, long terms) {
  if (k <= 0 || k >= n)
    throw std::domain_error("series_identity_residual: need 0 < k < n");
  if (terms < 1)
    throw std::invalid_argument("series_identity_residual: terms must be >= 1");
  const double x = static_cast<double>(k) / static_cast<double>(n);
  double partial = 1.0 / x;
  double sign = -1.0;
  for (long l = 1; l <= terms; ++l) {
    const double lp = static_cast<double>(l);
    partial += sign * (1.0 / (x + lp) + 1.0 / (x - lp));
    sign = -sign;
  }
  const double exact = std::numbers::pi / std::sin(std::numbers::pi * x);
  return std::abs(partial - exact);
}

double chi2_quantile_by_integration(double pfa, int dof) {
  if (!(pfa > 0.0 && pfa < 1.0))
    throw std::domain_error("chi2_quantile_by_integration: pfa in (0,1)");
  if (dof < 1)
    throw std::domain_error("chi2_quantile_by_integration: dof must be >= 1");
  const double target = 1.0 - pfa;
  double hi = static_cast<double>(dof);
  while (chi2_cdf_by_integration(hi, dof) < target) hi *= 2.0;
  double lo = 0.0;
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi);
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf_by_integration(mid, dof) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

CheckResult check(const std::string& name, double value, double bound) {
  return CheckResult{name, value <= bound, value, bound};
}

}  // namespace

std::vector<CheckResult> run_selfchecks(std::uint64_t seed) {
  std::vector<CheckResult> results;

  // Classical estimator vs direct sums on random signals.
  {
    RandomSource rng(mix_seed(seed, 1));
    const int n = 64;
    const std::vector<int> delays = {0, 1, 3};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      cvec x(n);
      for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
      const CaMatrix ca = classical_ca(x, delays);
      for (std::size_t l = 0; l < delays.size(); ++l) {
        for (int k = 0; k < n; ++k) {
          const cplx ref = direct_classical_ca(x, k, delays[l]);
          const double err = std::abs(ca.at(k, static_cast<int>(l)) - ref) /
                             std::max(1e-30, std::abs(ref));
          worst = std::max(worst, err);
        }
      }
    }
    results.push_back(check("classical-ca-vs-direct-sum", worst, 1e-9));
  }

  // Closed-form asymptotic CA vs the truncated aliasing sum.
  {
    const int n = 4000;
    const SignalModel model = SignalModel::bpsk(8);
    const int j = n / model.n_sym;
    double worst = 0.0;
    for (int d = 0; d <= 4; ++d) {
      for (int m = -7; m <= 7; ++m) {
        const int k = m * j;
        const cplx closed = asymptotic_ca(k, d, model, n);
        const cplx ref = aliasing_sum_ca(k, d, model.n_sym, n, model.sigma_a2,
                                         model.d_phi, 200000);
        worst = std::max(worst, std::abs(closed - ref));
      }
    }
    results.push_back(check("asymptotic-ca-vs-aliasing-sum", worst, 1e-6));
  }

  // Appendix series identity.
  {
    double worst = 0.0;
    for (int k : {500, 1000, 1500}) {
      worst = std::max(worst, series_identity_residual(k, 4000, 100000));
    }
    results.push_back(check("series-identity-residual", worst, 1e-4));
  }

  // Chi-squared quantiles vs the integration oracle.
  {
    double worst = 0.0;
    for (const auto& [pfa, dof] : std::vector<std::pair<double, int>>{
             {0.05, 8}, {0.5, 2}, {0.01, 8}, {0.1, 2}}) {
      worst = std::max(worst, std::abs(chi2_threshold(pfa, dof) -
                                       chi2_quantile_by_integration(pfa, dof)));
    }
    results.push_back(check("chi2-quantile-vs-integration", worst, 1e-6));
  }

  // Undersampled delay products vs the measurement operator image.
  {
    RandomSource rng(mix_seed(seed, 2));
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      SensingConfig cfg;
      cfg.n = 256;
      cfg.m_avail = 64 + static_cast<int>(rng.uniform_index(128));
      cfg.delays = {1, 2, 3, 4};
      cfg.c_r = 0.05 + 0.4 * rng.uniform();
      cvec x(cfg.n);
      for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
      const SamplingMask mask = build_mask(cfg, mix_seed(seed, 3, trial));
      const DelayProductMatrix full = delay_product_matrix(x, cfg.delays);
      const DelayProductMatrix direct = undersample(full, mask);
      const MeasurementOperator op(mask, cfg.delays);
      const DelayProductMatrix via_ca = op.apply(classical_ca(x, cfg.delays));
      for (int l = 0; l < direct.n_delays(); ++l) {
        // Zero-padded tail rows make entrywise relative error meaningless;
        // measure against the column scale instead.
        double scale = 0.0;
        for (const cplx& v : direct.columns[l]) {
          scale = std::max(scale, std::abs(v));
        }
        for (int i = 0; i < direct.rows(); ++i) {
          const cplx a = direct.columns[l][i];
          const cplx b = via_ca.columns[l][i];
          worst = std::max(worst, std::abs(a - b) / std::max(1e-30, scale));
        }
      }
    }
    results.push_back(check("undersample-round-trip", worst, 1e-9));
  }

  return results;
}

}  // namespace cyclosense::selfcheck
