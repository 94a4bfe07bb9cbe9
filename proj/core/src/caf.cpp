#include "cyclosense/caf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cyclosense {

int SensingConfig::consecutive_count() const {
  return static_cast<int>(std::ceil(c_r * static_cast<double>(m_avail)));
}

void SensingConfig::validate() const {
  if (n < 2) throw std::invalid_argument("SensingConfig: n must be >= 2");
  if (m_avail <= 0 || m_avail > n)
    throw std::invalid_argument("SensingConfig: need 0 < m_avail <= n");
  if (delays.empty())
    throw std::invalid_argument("SensingConfig: delay list must not be empty");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (delays[i] <= 0 || delays[i] >= n)
      throw std::invalid_argument(
          "SensingConfig: delays must be strictly positive and < n");
    for (std::size_t j = i + 1; j < delays.size(); ++j) {
      if (delays[i] == delays[j])
        throw std::invalid_argument("SensingConfig: delays must be distinct");
    }
  }
  if (c_r < 0.01 || c_r > 0.5)
    throw std::invalid_argument("SensingConfig: c_r must lie in [0.01, 0.5]");
}

cplx ca_row_phase(int k, int d, int n) {
  const double kw = static_cast<double>(wrapped_frequency(k, n));
  return std::polar(1.0, -std::numbers::pi * kw * static_cast<double>(d) /
                             static_cast<double>(n));
}

cvec delay_product(std::span<const cplx> x, int d) {
  const int n = static_cast<int>(x.size());
  if (d < 0 || d >= n)
    throw std::domain_error("delay_product: delay must satisfy 0 <= d < n");
  cvec out(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  for (int i = 0; i + d < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] *
        std::conj(x[static_cast<std::size_t>(i + d)]);
  }
  return out;
}

DelayProductMatrix delay_product_matrix(std::span<const cplx> x,
                                        std::span<const int> delays) {
  DelayProductMatrix p;
  p.full_size = static_cast<int>(x.size());
  p.delays.assign(delays.begin(), delays.end());
  p.columns.reserve(delays.size());
  for (int d : delays) p.columns.push_back(delay_product(x, d));
  return p;
}

CaMatrix classical_ca(std::span<const cplx> x, std::span<const int> delays) {
  if (delays.empty())
    throw std::invalid_argument("classical_ca: delay list must not be empty");
  return ca_matrix_from_products(delay_product_matrix(x, delays));
}

CaMatrix ca_matrix_from_products(const DelayProductMatrix& products) {
  if (products.delays.empty())
    throw std::invalid_argument(
        "ca_matrix_from_products: delay list must not be empty");
  if (products.rows() != products.full_size)
    throw std::invalid_argument(
        "ca_matrix_from_products: matrix must have full_size rows");
  const int n = products.full_size;
  CaMatrix ca;
  ca.n = n;
  ca.delays = products.delays;
  ca.columns.resize(products.columns.size());
  Dft dft(static_cast<std::size_t>(n));
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t l = 0; l < products.columns.size(); ++l) {
    cvec col = dft.forward(products.columns[l]);
    const int d = products.delays[l];
    for (int k = 0; k < n; ++k) {
      col[static_cast<std::size_t>(k)] *= scale * ca_row_phase(k, d, n);
    }
    ca.columns[l] = std::move(col);
  }
  return ca;
}

namespace detail {

cplx asymptotic_ca_value(int k_signed, int d, double symbol_len, int j,
                         double sigma_a2, double d_phi, int n) {
  const int abs_d = std::abs(d);
  // No pulse overlap at or beyond the symbol length.
  if (static_cast<double>(abs_d) >= symbol_len) return cplx{0.0, 0.0};
  if (k_signed == 0) {
    return cplx{sigma_a2 * (symbol_len - abs_d) / symbol_len, 0.0};
  }
  if (k_signed % j != 0) return cplx{0.0, 0.0};
  const double ratio = static_cast<double>(k_signed) / static_cast<double>(n);
  const double numer =
      std::sin(std::numbers::pi * ratio * (symbol_len - abs_d));
  const double denom = std::sin(std::numbers::pi * ratio);
  const cplx phase =
      std::polar(1.0, 2.0 * std::numbers::pi * ratio * d_phi);
  return (sigma_a2 / symbol_len) * (numer / denom) * phase;
}

}  // namespace detail

cplx asymptotic_ca(int k, int d, const SignalModel& model, int n) {
  if (model.n_sym < 1)
    throw std::invalid_argument("asymptotic_ca: n_sym must be >= 1");
  if (n <= 0 || n % model.n_sym != 0)
    throw std::invalid_argument(
        "asymptotic_ca: n must be a positive multiple of n_sym");
  if (std::abs(d) > model.n_sym)
    throw std::domain_error("asymptotic_ca: |d| must not exceed n_sym");
  if (std::abs(k) >= n)
    throw std::domain_error("asymptotic_ca: |k| must be below n");
  const int j = n / model.n_sym;
  return detail::asymptotic_ca_value(k, d, static_cast<double>(model.n_sym),
                                     j, model.sigma_a2, model.d_phi, n);
}

cvec asymptotic_ca_vector(const SignalModel& model, int n, int d) {
  cvec out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] =
        asymptotic_ca(wrapped_frequency(k, n), d, model, n);
  }
  return out;
}

CaMatrix asymptotic_ca_matrix(const SignalModel& model, int n,
                              std::span<const int> delays) {
  CaMatrix ca;
  ca.n = n;
  ca.delays.assign(delays.begin(), delays.end());
  ca.columns.reserve(delays.size());
  for (int d : delays) ca.columns.push_back(asymptotic_ca_vector(model, n, d));
  return ca;
}

}  // namespace cyclosense
