#pragma once

#include <cstdint>

namespace harakat::kernels {

// Arithmetic inner loops behind the nn module. Each entry has a scalar
// reference implementation and (on x86-64) an AVX2 variant; the active table
// is selected once at startup from CPUID and can be overridden for tests.
//
// The float tables vectorize the transcendentals with a polynomial exp; the
// double tables keep libm scalars so the 64-bit gradient-check mode carries
// no approximation error.
template <class Real>
struct Table {
  // y = A x            A is [m x n] row-major
  void (*gemv)(const Real* a, int64_t m, int64_t n, const Real* x, Real* y);
  // y += A x
  void (*gemv_acc)(const Real* a, int64_t m, int64_t n, const Real* x, Real* y);
  // x += A^T y
  void (*gemv_t_acc)(const Real* a, int64_t m, int64_t n, const Real* y, Real* x);
  // A += y x^T
  void (*ger_acc)(Real* a, int64_t m, int64_t n, const Real* y, const Real* x);

  void (*axpy)(int64_t n, Real alpha, const Real* x, Real* y);  // y += alpha x
  Real (*dot)(int64_t n, const Real* x, const Real* y);
  void (*mul)(int64_t n, const Real* a, const Real* b, Real* out);      // out = a.*b
  void (*mul_acc)(int64_t n, const Real* a, const Real* b, Real* out);  // out += a.*b
  void (*scale)(int64_t n, Real alpha, Real* x);

  void (*vsigmoid)(int64_t n, const Real* x, Real* y);
  void (*vtanh)(int64_t n, const Real* x, Real* y);
  void (*vexp)(int64_t n, const Real* x, Real* y);
  Real (*vsum)(int64_t n, const Real* x);
  Real (*vmax)(int64_t n, const Real* x);  // n >= 1

  // Bias-corrected Adam: m = b1 m + (1-b1) g; v = b2 v + (1-b2) g^2;
  // w -= lr * (m/bc1) / (sqrt(v/bc2) + eps), with bc_i = 1 - beta_i^t.
  void (*adam)(int64_t n, Real* w, const Real* g, Real* m, Real* v, Real lr,
               Real beta1, Real beta2, Real eps, Real bc1, Real bc2);
};

enum class Backend { Scalar, Avx2 };

bool avx2_supported();
Backend active_backend();
void set_backend(Backend b);  // throws harakat::Error if unsupported
void set_backend_auto();      // best supported backend

template <class Real>
const Table<Real>& active();

// Direct access to a specific variant (equivalence tests). Throws if the
// requested backend was not compiled in or is not supported by the CPU.
template <class Real>
const Table<Real>& table(Backend b);

}  // namespace harakat::kernels
