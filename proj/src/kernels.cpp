#include "detline/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace detline::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DETLINE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("DETLINE_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

Isa g_isa = initial_isa();

}  // namespace

bool avx2_available() { return cpu_has_avx2(); }
Isa active_isa() { return g_isa; }
const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) throw std::invalid_argument("AVX2 kernels unavailable on this host");
  g_isa = isa;
}

#ifdef DETLINE_HAVE_AVX2
#define DETLINE_DISPATCH(call) \
  if (g_isa == Isa::avx2) return avx2::call; \
  return scalar::call
#else
#define DETLINE_DISPATCH(call) return scalar::call
#endif

void sub_scaled(double* y, double a, const double* x, std::size_t n) { DETLINE_DISPATCH(sub_scaled(y, a, x, n)); }

void sub_scaled(std::complex<double>* y, std::complex<double> a, const std::complex<double>* x, std::size_t n) {
  DETLINE_DISPATCH(sub_scaled(y, a, x, n));
}

double dot(const double* x, const double* y, std::size_t n) { DETLINE_DISPATCH(dot(x, y, n)); }

std::complex<double> dot_conj(const std::complex<double>* x, const std::complex<double>* y, std::size_t n) {
  DETLINE_DISPATCH(dot_conj(x, y, n));
}

#undef DETLINE_DISPATCH

}  // namespace detline::kernels
