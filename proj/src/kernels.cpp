#include "tomo/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace tomo::kernels {

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sumsq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace detail

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  Isa isa;
};

constexpr Vtable kScalar{detail::dot_scalar, detail::axpy_scalar,
                         detail::scale_scalar, detail::sumsq_scalar,
                         detail::sum_scalar, Isa::scalar};

#if LOSSTOMO_HAVE_AVX2_TU
constexpr Vtable kAvx2{detail::dot_avx2, detail::axpy_avx2,
                       detail::scale_avx2, detail::sumsq_avx2,
                       detail::sum_avx2, Isa::avx2};
#endif

bool cpu_has_avx2() {
#if LOSSTOMO_HAVE_AVX2_TU && defined(__GNUC__) && \
    (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Vtable* select() {
  if (const char* env = std::getenv("LOSSTOMO_SIMD")) {
    std::string v(env);
    if (v == "scalar") return &kScalar;
#if LOSSTOMO_HAVE_AVX2_TU
    if (v == "avx2" && cpu_has_avx2()) return &kAvx2;
#endif
  }
#if LOSSTOMO_HAVE_AVX2_TU
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Vtable* g_active = select();

}  // namespace

Isa active_isa() { return g_active->isa; }

std::string isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) {
  if (isa == Isa::scalar) {
    g_active = &kScalar;
    return;
  }
#if LOSSTOMO_HAVE_AVX2_TU
  if (isa == Isa::avx2 && cpu_has_avx2()) {
    g_active = &kAvx2;
    return;
  }
#endif
  throw std::runtime_error("requested SIMD ISA not available on this CPU");
}

double dot(const double* x, const double* y, std::size_t n) {
  return g_active->dot(x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  g_active->axpy(a, x, y, n);
}
void scale(double* x, double a, std::size_t n) { g_active->scale(x, a, n); }
double sumsq(const double* x, std::size_t n) { return g_active->sumsq(x, n); }
double sum(const double* x, std::size_t n) { return g_active->sum(x, n); }

}  // namespace tomo::kernels
