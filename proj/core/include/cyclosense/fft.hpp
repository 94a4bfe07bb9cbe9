#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cyclosense {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Mixed-radix discrete Fourier transform of a fixed length.
///
/// The length is factored into primes and transformed with a Cooley-Tukey
/// recursion; a prime length degenerates into the direct O(n^2) sum, so any
/// size works. Smooth sizes (e.g. 4000 = 2^5 * 5^3) run in O(n log n).
///
/// Instances hold scratch buffers and are not safe to share across threads;
/// construction is cheap, so use one per thread.
class Dft {
 public:
  explicit Dft(std::size_t n);

  std::size_t size() const { return n_; }

  /// out[k] = sum_t in[t] * exp(-j 2 pi k t / n)
  void forward(std::span<const cplx> in, std::span<cplx> out);

  /// out[t] = (1/n) * sum_k in[k] * exp(+j 2 pi k t / n)
  void inverse(std::span<const cplx> in, std::span<cplx> out);

  cvec forward(std::span<const cplx> in);
  cvec inverse(std::span<const cplx> in);

 private:
  void transform(const cplx* in, std::size_t in_stride, cplx* out,
                 std::size_t n, std::size_t factor_index,
                 std::size_t twiddle_step);

  std::size_t n_;
  std::vector<std::size_t> factors_;
  cvec twiddles_;  // twiddles_[t] = exp(-j 2 pi t / n)
  cvec gather_;    // per-butterfly scratch, sized to the largest factor
};

}  // namespace cyclosense
