#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cyclosense/fft.hpp"
#include "cyclosense/rng.hpp"

using namespace cyclosense;

namespace {

cvec direct_dft(const cvec& x) {
  const std::size_t n = x.size();
  cvec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi *
                           static_cast<double>(k * t % n) /
                           static_cast<double>(n);
      acc += x[t] * std::polar(1.0, angle);
    }
    out[k] = acc;
  }
  return out;
}

cvec random_vector(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  cvec x(n);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  return x;
}

}  // namespace

TEST_CASE("matches the direct DFT across mixed and prime sizes") {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 12u, 16u, 25u, 37u,
                        38u, 64u, 100u, 150u, 256u}) {
    const cvec x = random_vector(n, 1000 + n);
    Dft dft(n);
    const cvec got = dft.forward(x);
    const cvec want = direct_dft(x);
    double scale = 1e-12;
    for (const auto& v : want) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n; ++k) {
      REQUIRE(std::abs(got[k] - want[k]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("inverse undoes forward") {
  for (std::size_t n : {6u, 37u, 150u, 1000u, 4000u}) {
    const cvec x = random_vector(n, 7 * n);
    Dft dft(n);
    const cvec back = dft.inverse(dft.forward(x));
    for (std::size_t t = 0; t < n; ++t) {
      REQUIRE(std::abs(back[t] - x[t]) <= 1e-10 * (1.0 + std::abs(x[t])));
    }
  }
}

TEST_CASE("linearity") {
  const std::size_t n = 150;
  const cvec a = random_vector(n, 11);
  const cvec b = random_vector(n, 12);
  const cplx alpha{0.7, -1.3};
  cvec mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = alpha * a[i] + b[i];
  Dft dft(n);
  const cvec fa = dft.forward(a);
  const cvec fb = dft.forward(b);
  const cvec fm = dft.forward(mix);
  for (std::size_t k = 0; k < n; ++k) {
    REQUIRE(std::abs(fm[k] - (alpha * fa[k] + fb[k])) <= 1e-9);
  }
}

TEST_CASE("rejects size mismatch and zero size") {
  CHECK_THROWS_AS(Dft(0), std::invalid_argument);
  Dft dft(8);
  cvec x(4);
  cvec out(8);
  CHECK_THROWS_AS(dft.forward(x, out), std::invalid_argument);
}
