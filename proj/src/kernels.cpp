#include "harakat/kernels.hpp"

#include "harakat/common.hpp"

namespace harakat::kernels {

template <class Real>
Table<Real> make_scalar_table();

#if defined(HARAKAT_HAVE_AVX2)
template <class Real>
Table<Real> make_avx2_table();
#endif

bool avx2_supported() {
#if defined(HARAKAT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {
Backend g_backend = avx2_supported() ? Backend::Avx2 : Backend::Scalar;

template <class Real>
const Table<Real>& scalar_instance() {
  static const Table<Real> t = make_scalar_table<Real>();
  return t;
}

#if defined(HARAKAT_HAVE_AVX2)
template <class Real>
const Table<Real>& avx2_instance() {
  static const Table<Real> t = make_avx2_table<Real>();
  return t;
}
#endif
}  // namespace

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported())
    throw Error("AVX2 backend not available on this build/CPU");
  g_backend = b;
}

void set_backend_auto() {
  g_backend = avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

template <class Real>
const Table<Real>& table(Backend b) {
  if (b == Backend::Scalar) return scalar_instance<Real>();
#if defined(HARAKAT_HAVE_AVX2)
  if (!avx2_supported()) throw Error("AVX2 backend not available on this CPU");
  return avx2_instance<Real>();
#else
  throw Error("AVX2 backend not compiled in");
#endif
}

template <class Real>
const Table<Real>& active() {
  return table<Real>(g_backend);
}

template const Table<float>& table<float>(Backend);
template const Table<double>& table<double>(Backend);
template const Table<float>& active<float>();
template const Table<double>& active<double>();

}  // namespace harakat::kernels
