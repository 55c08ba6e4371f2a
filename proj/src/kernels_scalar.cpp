#include <cmath>

#include "harakat/kernels.hpp"

// Reference implementations. Deliberately straightforward: these are the
// semantics the SIMD variants are equivalence-tested against.

namespace harakat::kernels {
namespace {

template <class Real>
void gemv(const Real* a, int64_t m, int64_t n, const Real* x, Real* y) {
  for (int64_t r = 0; r < m; ++r) {
    Real s = 0;
    const Real* row = a + r * n;
    for (int64_t i = 0; i < n; ++i) s += row[i] * x[i];
    y[r] = s;
  }
}

template <class Real>
void gemv_acc(const Real* a, int64_t m, int64_t n, const Real* x, Real* y) {
  for (int64_t r = 0; r < m; ++r) {
    Real s = 0;
    const Real* row = a + r * n;
    for (int64_t i = 0; i < n; ++i) s += row[i] * x[i];
    y[r] += s;
  }
}

template <class Real>
void gemv_t_acc(const Real* a, int64_t m, int64_t n, const Real* y, Real* x) {
  for (int64_t r = 0; r < m; ++r) {
    const Real* row = a + r * n;
    Real c = y[r];
    for (int64_t i = 0; i < n; ++i) x[i] += c * row[i];
  }
}

template <class Real>
void ger_acc(Real* a, int64_t m, int64_t n, const Real* y, const Real* x) {
  for (int64_t r = 0; r < m; ++r) {
    Real* row = a + r * n;
    Real c = y[r];
    for (int64_t i = 0; i < n; ++i) row[i] += c * x[i];
  }
}

template <class Real>
void axpy(int64_t n, Real alpha, const Real* x, Real* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class Real>
Real dot(int64_t n, const Real* x, const Real* y) {
  Real s = 0;
  for (int64_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <class Real>
void mul(int64_t n, const Real* a, const Real* b, Real* out) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

template <class Real>
void mul_acc(int64_t n, const Real* a, const Real* b, Real* out) {
  for (int64_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

template <class Real>
void scale(int64_t n, Real alpha, Real* x) {
  for (int64_t i = 0; i < n; ++i) x[i] *= alpha;
}

template <class Real>
void vsigmoid(int64_t n, const Real* x, Real* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = Real(1) / (Real(1) + std::exp(-x[i]));
}

template <class Real>
void vtanh(int64_t n, const Real* x, Real* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

template <class Real>
void vexp(int64_t n, const Real* x, Real* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

template <class Real>
Real vsum(int64_t n, const Real* x) {
  Real s = 0;
  for (int64_t i = 0; i < n; ++i) s += x[i];
  return s;
}

template <class Real>
Real vmax(int64_t n, const Real* x) {
  Real s = x[0];
  for (int64_t i = 1; i < n; ++i) s = x[i] > s ? x[i] : s;
  return s;
}

template <class Real>
void adam(int64_t n, Real* w, const Real* g, Real* m, Real* v, Real lr,
          Real beta1, Real beta2, Real eps, Real bc1, Real bc2) {
  for (int64_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (Real(1) - beta1) * g[i];
    v[i] = beta2 * v[i] + (Real(1) - beta2) * g[i] * g[i];
    Real mhat = m[i] / bc1;
    Real vhat = v[i] / bc2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

template <class Real>
Table<Real> make_scalar_table() {
  Table<Real> t;
  t.gemv = &gemv<Real>;
  t.gemv_acc = &gemv_acc<Real>;
  t.gemv_t_acc = &gemv_t_acc<Real>;
  t.ger_acc = &ger_acc<Real>;
  t.axpy = &axpy<Real>;
  t.dot = &dot<Real>;
  t.mul = &mul<Real>;
  t.mul_acc = &mul_acc<Real>;
  t.scale = &scale<Real>;
  t.vsigmoid = &vsigmoid<Real>;
  t.vtanh = &vtanh<Real>;
  t.vexp = &vexp<Real>;
  t.vsum = &vsum<Real>;
  t.vmax = &vmax<Real>;
  t.adam = &adam<Real>;
  return t;
}

template Table<float> make_scalar_table<float>();
template Table<double> make_scalar_table<double>();

}  // namespace harakat::kernels
