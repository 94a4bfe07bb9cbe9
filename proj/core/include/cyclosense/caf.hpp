#pragma once

#include <span>
#include <vector>

#include "cyclosense/fft.hpp"
#include "cyclosense/signal.hpp"

namespace cyclosense {

/// Sensing problem dimensions: CA size n, number of known delay-product
/// elements m_avail, the discrete delays of interest, and the fraction of
/// known elements taken as a consecutive prefix.
struct SensingConfig {
  int n = 4000;
  int m_avail = 1000;
  std::vector<int> delays = {1, 2, 3, 4};
  double c_r = 0.15;

  int consecutive_count() const;  // ceil(c_r * m_avail)
  void validate() const;          // throws std::invalid_argument
};

/// Column-major matrix of delay products. A full matrix has full_size rows;
/// an undersampled one keeps full_size as the size it was drawn from.
struct DelayProductMatrix {
  int full_size = 0;
  std::vector<int> delays;
  std::vector<cvec> columns;  // one per delay

  int rows() const {
    return columns.empty() ? 0 : static_cast<int>(columns.front().size());
  }
  int n_delays() const { return static_cast<int>(delays.size()); }
};

/// Cyclic autocorrelation over discrete cycle frequencies (rows) x delays
/// (columns). Rows 0..n/2 are nonnegative frequencies, rows n/2+1..n-1 the
/// negative ones (k interpreted as k - n).
struct CaMatrix {
  int n = 0;
  std::vector<int> delays;
  std::vector<cvec> columns;

  int n_delays() const { return static_cast<int>(delays.size()); }
  const cplx& at(int k, int delay_index) const {
    return columns[static_cast<std::size_t>(delay_index)]
                  [static_cast<std::size_t>(k)];
  }
};

/// Frequency index folded into the signed convention: k for k <= n/2,
/// k - n above.
inline int wrapped_frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

/// Phase factor exp(-j pi k d / n) applied per CA row; rows above n/2 use
/// the wrapped (negative) frequency.
cplx ca_row_phase(int k, int d, int n);

/// Elementwise x[i] * conj(x[i+d]), zero-padded over the last d entries.
cvec delay_product(std::span<const cplx> x, int d);

DelayProductMatrix delay_product_matrix(std::span<const cplx> x,
                                        std::span<const int> delays);

/// Classical biased CA estimate: per delay, (1/n) * DFT(delay product),
/// each row multiplied by ca_row_phase.
CaMatrix classical_ca(std::span<const cplx> x, std::span<const int> delays);

/// Matrix form of the classical estimator; requires a full delay-product
/// matrix (rows == full_size) and matches classical_ca exactly.
CaMatrix ca_matrix_from_products(const DelayProductMatrix& products);

/// Closed-form asymptotic CA of the sampled rectangular-pulse signal at
/// signed discrete cycle frequency k: nonzero only when k is a multiple of
/// n / n_sym; the k = 0 value is the continuity limit. |d| must not exceed
/// n_sym and n must be a multiple of n_sym.
cplx asymptotic_ca(int k, int d, const SignalModel& model, int n);

/// Length-n vector of asymptotic_ca laid out in the DFT row convention.
cvec asymptotic_ca_vector(const SignalModel& model, int n, int d);

/// Asymptotic reference matrix over several delays.
CaMatrix asymptotic_ca_matrix(const SignalModel& model, int n,
                              std::span<const int> delays);

namespace detail {

/// Shared closed-form evaluator with the candidate frequency spacing j
/// (= n / symbol_len) given explicitly; symbol_len may be fractional, as
/// used by the asymptotic dictionary columns. Delays at or beyond the
/// symbol length yield zero.
cplx asymptotic_ca_value(int k_signed, int d, double symbol_len, int j,
                         double sigma_a2, double d_phi, int n);

}  // namespace detail

}  // namespace cyclosense
