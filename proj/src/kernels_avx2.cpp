#if defined(HARAKAT_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

#include "harakat/kernels.hpp"

// AVX2+FMA variants. Float transcendentals use a range-reduced polynomial
// exp (absolute error vs libm around 1e-7 over the training range); the
// double table keeps libm scalars for the transcendentals.

namespace harakat::kernels {
namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehl_ps(lo, lo);
  lo = _mm_add_ps(lo, sh);
  sh = _mm_shuffle_ps(lo, lo, 1);
  lo = _mm_add_ss(lo, sh);
  return _mm_cvtss_f32(lo);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  lo = _mm_add_sd(lo, sh);
  return _mm_cvtsd_f64(lo);
}

// ---- float ----------------------------------------------------------------

void gemv_f(const float* a, int64_t m, int64_t n, const float* x, float* y) {
  for (int64_t r = 0; r < m; ++r) {
    const float* row = a + r * n;
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    int64_t i = 0;
    for (; i + 16 <= n; i += 16) {
      acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(row + i), _mm256_loadu_ps(x + i), acc0);
      acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(row + i + 8), _mm256_loadu_ps(x + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
      acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(row + i), _mm256_loadu_ps(x + i), acc0);
    float s = hsum(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) s += row[i] * x[i];
    y[r] = s;
  }
}

void gemv_acc_f(const float* a, int64_t m, int64_t n, const float* x, float* y) {
  for (int64_t r = 0; r < m; ++r) {
    const float* row = a + r * n;
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    int64_t i = 0;
    for (; i + 16 <= n; i += 16) {
      acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(row + i), _mm256_loadu_ps(x + i), acc0);
      acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(row + i + 8), _mm256_loadu_ps(x + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
      acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(row + i), _mm256_loadu_ps(x + i), acc0);
    float s = hsum(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) s += row[i] * x[i];
    y[r] += s;
  }
}

inline void axpy_f(int64_t n, float alpha, const float* x, float* y) {
  __m256 va = _mm256_set1_ps(alpha);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_t_acc_f(const float* a, int64_t m, int64_t n, const float* y, float* x) {
  for (int64_t r = 0; r < m; ++r) axpy_f(n, y[r], a + r * n, x);
}

void ger_acc_f(float* a, int64_t m, int64_t n, const float* y, const float* x) {
  for (int64_t r = 0; r < m; ++r) axpy_f(n, y[r], x, a + r * n);
}

float dot_f(int64_t n, const float* x, const float* y) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8)
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
  float s = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void mul_f(int64_t n, const float* a, const float* b, float* out) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc_f(int64_t n, const float* a, const float* b, float* out) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vo = _mm256_loadu_ps(out + i);
    vo = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), vo);
    _mm256_storeu_ps(out + i, vo);
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void scale_f(int64_t n, float alpha, float* x) {
  __m256 va = _mm256_set1_ps(alpha);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(x + i, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

// exp on 8 lanes: clamp, split x = k ln2 + r, degree-5 polynomial in r,
// reassemble with the exponent bits.
inline __m256 exp8(__m256 x) {
  // Upper clamp keeps the post-rounding exponent at <= 127 (no inf).
  const __m256 hi = _mm256_set1_ps(88.0f);
  const __m256 lo = _mm256_set1_ps(-87.3365478515625f);
  const __m256 log2e = _mm256_set1_ps(1.44269504088896341f);
  const __m256 c1 = _mm256_set1_ps(0.693359375f);
  const __m256 c2 = _mm256_set1_ps(-2.12194440e-4f);
  const __m256 one = _mm256_set1_ps(1.0f);

  x = _mm256_min_ps(x, hi);
  x = _mm256_max_ps(x, lo);

  __m256 fx = _mm256_fmadd_ps(x, log2e, _mm256_set1_ps(0.5f));
  fx = _mm256_floor_ps(fx);
  x = _mm256_fnmadd_ps(fx, c1, x);
  x = _mm256_fnmadd_ps(fx, c2, x);

  __m256 z = _mm256_mul_ps(x, x);
  __m256 y = _mm256_set1_ps(1.9875691500e-4f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(5.0000001201e-1f));
  y = _mm256_fmadd_ps(y, z, _mm256_add_ps(x, one));

  __m256i k = _mm256_cvtps_epi32(fx);
  k = _mm256_add_epi32(k, _mm256_set1_epi32(127));
  k = _mm256_slli_epi32(k, 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(k));
}

void vexp_f(int64_t n, const float* x, float* y) {
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(y + i, exp8(_mm256_loadu_ps(x + i)));
  for (; i < n; ++i) {
    float buf[8] = {x[i], 0, 0, 0, 0, 0, 0, 0};
    __m256 v = exp8(_mm256_loadu_ps(buf));
    _mm256_storeu_ps(buf, v);
    y[i] = buf[0];
  }
}

void vsigmoid_f(int64_t n, const float* x, float* y) {
  const __m256 one = _mm256_set1_ps(1.0f);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 e = exp8(_mm256_sub_ps(_mm256_setzero_ps(), _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, _mm256_div_ps(one, _mm256_add_ps(one, e)));
  }
  for (; i < n; ++i) {
    float buf[8] = {-x[i], 0, 0, 0, 0, 0, 0, 0};
    __m256 v = exp8(_mm256_loadu_ps(buf));
    _mm256_storeu_ps(buf, v);
    y[i] = 1.0f / (1.0f + buf[0]);
  }
}

// tanh(x) = (e^{2x} - 1) / (e^{2x} + 1); the exp clamp saturates cleanly.
void vtanh_f(int64_t n, const float* x, float* y) {
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 two = _mm256_set1_ps(2.0f);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 e = exp8(_mm256_mul_ps(two, _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, _mm256_div_ps(_mm256_sub_ps(e, one), _mm256_add_ps(e, one)));
  }
  for (; i < n; ++i) {
    float buf[8] = {2.0f * x[i], 0, 0, 0, 0, 0, 0, 0};
    __m256 v = exp8(_mm256_loadu_ps(buf));
    _mm256_storeu_ps(buf, v);
    y[i] = (buf[0] - 1.0f) / (buf[0] + 1.0f);
  }
}

float vsum_f(int64_t n, const float* x) {
  __m256 acc = _mm256_setzero_ps();
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
  float s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

float vmax_f(int64_t n, const float* x) {
  float s = x[0];
  int64_t i = 0;
  if (n >= 8) {
    __m256 acc = _mm256_loadu_ps(x);
    for (i = 8; i + 8 <= n; i += 8) acc = _mm256_max_ps(acc, _mm256_loadu_ps(x + i));
    float buf[8];
    _mm256_storeu_ps(buf, acc);
    s = buf[0];
    for (int k = 1; k < 8; ++k) s = buf[k] > s ? buf[k] : s;
  }
  for (; i < n; ++i) s = x[i] > s ? x[i] : s;
  return s;
}

void adam_f(int64_t n, float* w, const float* g, float* m, float* v, float lr,
            float beta1, float beta2, float eps, float bc1, float bc2) {
  const __m256 vb1 = _mm256_set1_ps(beta1);
  const __m256 vb2 = _mm256_set1_ps(beta2);
  const __m256 v1b1 = _mm256_set1_ps(1.0f - beta1);
  const __m256 v1b2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 vlr = _mm256_set1_ps(lr);
  const __m256 veps = _mm256_set1_ps(eps);
  const __m256 rbc1 = _mm256_set1_ps(1.0f / bc1);
  const __m256 rbc2 = _mm256_set1_ps(1.0f / bc2);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vg = _mm256_loadu_ps(g + i);
    __m256 vm = _mm256_fmadd_ps(v1b1, vg, _mm256_mul_ps(vb1, _mm256_loadu_ps(m + i)));
    __m256 vv = _mm256_fmadd_ps(v1b2, _mm256_mul_ps(vg, vg), _mm256_mul_ps(vb2, _mm256_loadu_ps(v + i)));
    _mm256_storeu_ps(m + i, vm);
    _mm256_storeu_ps(v + i, vv);
    __m256 mhat = _mm256_mul_ps(vm, rbc1);
    __m256 vhat = _mm256_mul_ps(vv, rbc2);
    __m256 den = _mm256_add_ps(_mm256_sqrt_ps(vhat), veps);
    __m256 upd = _mm256_div_ps(_mm256_mul_ps(vlr, mhat), den);
    _mm256_storeu_ps(w + i, _mm256_sub_ps(_mm256_loadu_ps(w + i), upd));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
    float mhat = m[i] * (1.0f / bc1);
    float vhat = v[i] * (1.0f / bc2);
    w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

// ---- double ---------------------------------------------------------------

void gemv_d(const double* a, int64_t m, int64_t n, const double* x, double* y) {
  for (int64_t r = 0; r < m; ++r) {
    const double* row = a + r * n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + i), _mm256_loadu_pd(x + i), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + i + 4), _mm256_loadu_pd(x + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + i), _mm256_loadu_pd(x + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += row[i] * x[i];
    y[r] = s;
  }
}

void gemv_acc_d(const double* a, int64_t m, int64_t n, const double* x, double* y) {
  for (int64_t r = 0; r < m; ++r) {
    const double* row = a + r * n;
    __m256d acc = _mm256_setzero_pd();
    int64_t i = 0;
    for (; i + 4 <= n; i += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + i), _mm256_loadu_pd(x + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += row[i] * x[i];
    y[r] += s;
  }
}

inline void axpy_d(int64_t n, double alpha, const double* x, double* y) {
  __m256d va = _mm256_set1_pd(alpha);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_t_acc_d(const double* a, int64_t m, int64_t n, const double* y, double* x) {
  for (int64_t r = 0; r < m; ++r) axpy_d(n, y[r], a + r * n, x);
}

void ger_acc_d(double* a, int64_t m, int64_t n, const double* y, const double* x) {
  for (int64_t r = 0; r < m; ++r) axpy_d(n, y[r], x, a + r * n);
}

double dot_d(int64_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void mul_d(int64_t n, const double* a, const double* b, double* out) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc_d(int64_t n, const double* a, const double* b, double* out) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vo = _mm256_loadu_pd(out + i);
    vo = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), vo);
    _mm256_storeu_pd(out + i, vo);
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void scale_d(int64_t n, double alpha, double* x) {
  __m256d va = _mm256_set1_pd(alpha);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void vsigmoid_d(int64_t n, const double* x, double* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}
void vtanh_d(int64_t n, const double* x, double* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}
void vexp_d(int64_t n, const double* x, double* y) {
  for (int64_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

double vsum_d(int64_t n, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double vmax_d(int64_t n, const double* x) {
  double s = x[0];
  for (int64_t i = 1; i < n; ++i) s = x[i] > s ? x[i] : s;
  return s;
}

void adam_d(int64_t n, double* w, const double* g, double* m, double* v, double lr,
            double beta1, double beta2, double eps, double bc1, double bc2) {
  for (int64_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

template <class Real>
Table<Real> make_avx2_table();

template <>
Table<float> make_avx2_table<float>() {
  Table<float> t;
  t.gemv = &gemv_f;
  t.gemv_acc = &gemv_acc_f;
  t.gemv_t_acc = &gemv_t_acc_f;
  t.ger_acc = &ger_acc_f;
  t.axpy = [](int64_t n, float a, const float* x, float* y) { axpy_f(n, a, x, y); };
  t.dot = &dot_f;
  t.mul = &mul_f;
  t.mul_acc = &mul_acc_f;
  t.scale = &scale_f;
  t.vsigmoid = &vsigmoid_f;
  t.vtanh = &vtanh_f;
  t.vexp = &vexp_f;
  t.vsum = &vsum_f;
  t.vmax = &vmax_f;
  t.adam = &adam_f;
  return t;
}

template <>
Table<double> make_avx2_table<double>() {
  Table<double> t;
  t.gemv = &gemv_d;
  t.gemv_acc = &gemv_acc_d;
  t.gemv_t_acc = &gemv_t_acc_d;
  t.ger_acc = &ger_acc_d;
  t.axpy = [](int64_t n, double a, const double* x, double* y) { axpy_d(n, a, x, y); };
  t.dot = &dot_d;
  t.mul = &mul_d;
  t.mul_acc = &mul_acc_d;
  t.scale = &scale_d;
  t.vsigmoid = &vsigmoid_d;
  t.vtanh = &vtanh_d;
  t.vexp = &vexp_d;
  t.vsum = &vsum_d;
  t.vmax = &vmax_d;
  t.adam = &adam_d;
  return t;
}

}  // namespace harakat::kernels

#endif  // HARAKAT_HAVE_AVX2
