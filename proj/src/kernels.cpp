#include "ugglan/kernels.hpp"

namespace ugglan::kern {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
#endif

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using ScaleFn = void (*)(double, double*, std::size_t);

struct Dispatch {
  Backend backend = Backend::Scalar;
  DotFn dot = dot_scalar;
  AxpyFn axpy = axpy_scalar;
  ScaleFn scale = scale_scalar;
};

Dispatch make_dispatch(Backend b) {
  Dispatch d;
  d.backend = b;
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::Avx2) {
    d.dot = dot_avx2;
    d.axpy = axpy_avx2;
    d.scale = scale_avx2;
  }
#endif
  return d;
}

Backend best_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

Dispatch& dispatch() {
  static Dispatch d = make_dispatch(best_backend());
  return d;
}

}  // namespace detail

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return detail::dispatch().backend; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
  detail::dispatch() = detail::make_dispatch(b);
}

double dot(const double* a, const double* b, std::size_t n) {
  return detail::dispatch().dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  detail::dispatch().axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  detail::dispatch().scale(alpha, x, n);
}

void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n) {
  const detail::Dispatch& d = detail::dispatch();
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      if (ai[p] != 0.0) d.axpy(ai[p], b + p * n, ci, n);
    }
  }
}

void matmul_tn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
  const detail::Dispatch& d = detail::dispatch();
  for (std::size_t r = 0; r < m; ++r) {
    const double* ar = a + r * k;
    const double* br = b + r * n;
    for (std::size_t i = 0; i < k; ++i) {
      if (ar[i] != 0.0) d.axpy(ar[i], br, c + i * n, n);
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n) {
  const detail::Dispatch& d = detail::dispatch();
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      ci[j] += d.dot(ai, b + j * k, k);
    }
  }
}

}  // namespace ugglan::kern
