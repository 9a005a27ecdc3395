#pragma once

#include <cstddef>

// Per-backend entry points wired up by the dispatcher.

namespace rewriter::kernels {

#if defined(__x86_64__) || defined(_M_X64)
#define REWRITER_KERNELS_X86 1
#else
#define REWRITER_KERNELS_X86 0
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define REWRITER_KERNELS_ARM 1
#else
#define REWRITER_KERNELS_ARM 0
#endif

namespace avx2 {
bool available();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c);
}  // namespace avx2

namespace neon {
bool available();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c);
}  // namespace neon

}  // namespace rewriter::kernels
