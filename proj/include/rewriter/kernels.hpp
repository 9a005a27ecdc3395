#pragma once

#include <cstddef>
#include <string>

namespace rewriter::kernels {

enum class Backend { Scalar, Avx2, Neon };

// Active backend: auto-detected on first use, overridable via the
// RULEREWRITER_KERNELS environment variable (scalar|avx2|neon|auto) or
// force_backend(). Forcing an unsupported backend falls back to scalar.
Backend active_backend();
const char* backend_name(Backend b);
void force_backend(Backend b);

// Dispatched dense-double primitives used by the encoder's inner loops.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);

// C (n x m) = A (n x k, row-major) * B (m x k, row-major) transposed:
// C[i][j] = dot(A row i, B row j). Weight matrices are stored row-major
// as (out x in), so y = W x is gemm_nt(x as 1 x in, W as out x in).
void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c);

// Reference implementations, always available for equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c);
}  // namespace scalar

}  // namespace rewriter::kernels
