#include "rewriter/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace rewriter::kernels {

namespace {

Backend detect() {
  if (const char* env = std::getenv("RULEREWRITER_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0) {
      return avx2::available() ? Backend::Avx2 : Backend::Scalar;
    }
    if (std::strcmp(env, "neon") == 0) {
      return neon::available() ? Backend::Neon : Backend::Scalar;
    }
    // "auto" or anything else falls through to detection.
  }
  if (avx2::available()) return Backend::Avx2;
  if (neon::available()) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{detect()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(); }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "scalar";
}

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2::available()) b = Backend::Scalar;
  if (b == Backend::Neon && !neon::available()) b = Backend::Scalar;
  backend_slot().store(b);
}

double dot(const double* a, const double* b, std::size_t n) {
  switch (active_backend()) {
    case Backend::Avx2: return avx2::dot(a, b, n);
    case Backend::Neon: return neon::dot(a, b, n);
    default: return scalar::dot(a, b, n);
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  switch (active_backend()) {
    case Backend::Avx2: avx2::axpy(alpha, x, y, n); return;
    case Backend::Neon: neon::axpy(alpha, x, y, n); return;
    default: scalar::axpy(alpha, x, y, n); return;
  }
}

void scale(double alpha, double* x, std::size_t n) {
  switch (active_backend()) {
    case Backend::Avx2: avx2::scale(alpha, x, n); return;
    case Backend::Neon: neon::scale(alpha, x, n); return;
    default: scalar::scale(alpha, x, n); return;
  }
}

void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c) {
  switch (active_backend()) {
    case Backend::Avx2: avx2::gemm_nt(a, n, k, b, m, c); return;
    case Backend::Neon: neon::gemm_nt(a, n, k, b, m, c); return;
    default: scalar::gemm_nt(a, n, k, b, m, c); return;
  }
}

}  // namespace rewriter::kernels
