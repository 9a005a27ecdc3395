#include "kernels_impl.hpp"

#if REWRITER_KERNELS_ARM

#include <arm_neon.h>

namespace rewriter::kernels::neon {

bool available() { return true; }

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double sum = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      c[i * m + j] = dot(a + i * k, b + j * k, k);
    }
  }
}

}  // namespace rewriter::kernels::neon

#else

namespace rewriter::kernels::neon {

bool available() { return false; }

double dot(const double*, const double*, std::size_t) { return 0.0; }
void axpy(double, const double*, double*, std::size_t) {}
void scale(double, double*, std::size_t) {}
void gemm_nt(const double*, std::size_t, std::size_t, const double*,
             std::size_t, double*) {}

}  // namespace rewriter::kernels::neon

#endif
