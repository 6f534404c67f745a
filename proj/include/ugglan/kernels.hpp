#pragma once

#include <cstddef>

// Dense double-precision kernels used by the neural layers and PageRank.
// A scalar reference implementation is always available; an AVX2 variant
// is selected at startup when the CPU supports it. set_backend() exists so
// the equivalence tests can force either path.
namespace ugglan::kern {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void set_backend(Backend b);
bool avx2_available();

double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x *= alpha
void scale(double alpha, double* x, std::size_t n);

// C += A * B          A: m x k, B: k x n, C: m x n (row-major)
void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n);

// C += A^T * B        A: m x k, B: m x n, C: k x n
void matmul_tn(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);

// C += A * B^T        A: m x k, B: n x k, C: m x n
void matmul_nt(const double* a, const double* b, double* c,
               std::size_t m, std::size_t k, std::size_t n);

}  // namespace ugglan::kern
