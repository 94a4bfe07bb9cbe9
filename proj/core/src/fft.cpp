#include "cyclosense/fft.hpp"

#include <numbers>
#include <stdexcept>

namespace cyclosense {

namespace {

std::vector<std::size_t> prime_factors(std::size_t n) {
  std::vector<std::size_t> factors;
  for (std::size_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
    while (n % p == 0) {
      factors.push_back(p);
      n /= p;
    }
  }
  if (n > 1) factors.push_back(n);
  return factors;
}

}  // namespace

Dft::Dft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Dft: size must be positive");
  factors_ = prime_factors(n);
  twiddles_.resize(n);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) {
    twiddles_[t] = std::polar(1.0, step * static_cast<double>(t));
  }
  std::size_t max_factor = 1;
  for (std::size_t p : factors_) max_factor = std::max(max_factor, p);
  gather_.resize(max_factor);
}

void Dft::transform(const cplx* in, std::size_t in_stride, cplx* out,
                    std::size_t n, std::size_t factor_index,
                    std::size_t twiddle_step) {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = factors_[factor_index];
  const std::size_t m = n / p;
  // Decimate in time: residue-r subsequence transforms land in out[r*m ..].
  for (std::size_t r = 0; r < p; ++r) {
    transform(in + r * in_stride, in_stride * p, out + r * m, m,
              factor_index + 1, twiddle_step * p);
  }
  // Combine: X[k2 + q*m] = sum_r twiddle(n, r*k2) * Y_r[k2] * omega_p^(r*q).
  for (std::size_t k2 = 0; k2 < m; ++k2) {
    for (std::size_t r = 0; r < p; ++r) {
      const std::size_t t = (r * k2 * twiddle_step) % n_;
      gather_[r] = out[r * m + k2] * twiddles_[t];
    }
    for (std::size_t q = 0; q < p; ++q) {
      cplx acc = gather_[0];
      for (std::size_t r = 1; r < p; ++r) {
        const std::size_t t = ((r * q) % p) * m * twiddle_step % n_;
        acc += gather_[r] * twiddles_[t];
      }
      out[k2 + q * m] = acc;
    }
  }
}

void Dft::forward(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n_ || out.size() != n_)
    throw std::invalid_argument("Dft::forward: size mismatch");
  if (in.data() == out.data())
    throw std::invalid_argument("Dft::forward: in-place not supported");
  transform(in.data(), 1, out.data(), n_, 0, 1);
}

void Dft::inverse(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n_ || out.size() != n_)
    throw std::invalid_argument("Dft::inverse: size mismatch");
  cvec tmp(in.begin(), in.end());
  for (auto& v : tmp) v = std::conj(v);
  forward(tmp, out);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : out) v = std::conj(v) * scale;
}

cvec Dft::forward(std::span<const cplx> in) {
  cvec out(n_);
  forward(in, out);
  return out;
}

cvec Dft::inverse(std::span<const cplx> in) {
  cvec out(n_);
  inverse(in, out);
  return out;
}

}  // namespace cyclosense
