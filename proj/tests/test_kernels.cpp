#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ugglan/kernels.hpp"

using namespace ugglan;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dot matches a plain loop") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 129u}) {
    std::vector<double> a = random_vec(rng, n), b = random_vec(rng, n);
    double expect = 0.0;
    for (std::size_t i = 0; i < n; ++i) expect += a[i] * b[i];
    CHECK(kern::dot(a.data(), b.data(), n) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("scalar and avx2 backends agree") {
  if (!kern::avx2_available()) return;
  std::mt19937_64 rng(11);
  kern::Backend before = kern::active_backend();
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(rng() % 200);
    std::vector<double> a = random_vec(rng, n), b = random_vec(rng, n);
    std::vector<double> y1 = b, y2 = b;
    double alpha = 0.37;

    kern::set_backend(kern::Backend::Scalar);
    double d1 = kern::dot(a.data(), b.data(), n);
    kern::axpy(alpha, a.data(), y1.data(), n);
    std::vector<double> s1 = a;
    kern::scale(alpha, s1.data(), n);

    kern::set_backend(kern::Backend::Avx2);
    double d2 = kern::dot(a.data(), b.data(), n);
    kern::axpy(alpha, a.data(), y2.data(), n);
    std::vector<double> s2 = a;
    kern::scale(alpha, s2.data(), n);

    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
      CHECK(s1[i] == s2[i]);
    }
  }
  kern::set_backend(before);
}

TEST_CASE("matmul variants match a naive triple loop") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t m = 1 + rng() % 9, k = 1 + rng() % 9, n = 1 + rng() % 9;
    std::vector<double> a = random_vec(rng, m * k);
    std::vector<double> b = random_vec(rng, k * n);
    std::vector<double> c(m * n, 0.5), expect(m * n, 0.5);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < k; ++p)
          expect[i * n + j] += a[i * k + p] * b[p * n + j];
    kern::matmul(a.data(), b.data(), c.data(), m, k, n);
    for (std::size_t i = 0; i < m * n; ++i)
      CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-12));

    // A^T * B with A: m x k gives k x n
    std::vector<double> bt = random_vec(rng, m * n);
    std::vector<double> c2(k * n, 0.0), expect2(k * n, 0.0);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
          expect2[p * n + j] += a[i * k + p] * bt[i * n + j];
    kern::matmul_tn(a.data(), bt.data(), c2.data(), m, k, n);
    for (std::size_t i = 0; i < k * n; ++i)
      CHECK(c2[i] == doctest::Approx(expect2[i]).epsilon(1e-12));

    // A * B^T with B: n x k gives m x n
    std::vector<double> bn = random_vec(rng, n * k);
    std::vector<double> c3(m * n, 0.0), expect3(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < k; ++p)
          expect3[i * n + j] += a[i * k + p] * bn[j * k + p];
    kern::matmul_nt(a.data(), bn.data(), c3.data(), m, k, n);
    for (std::size_t i = 0; i < m * n; ++i)
      CHECK(c3[i] == doctest::Approx(expect3[i]).epsilon(1e-12));
  }
}

}  // TEST_SUITE
