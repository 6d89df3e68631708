#include <immintrin.h>

#include "detline/kernels.hpp"

namespace detline::kernels::avx2 {

void sub_scaled(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_fnmadd_pd(va, vx, vy));
  }
  for (; i < n; ++i) y[i] -= a * x[i];
}

// Interleaved (re, im) pairs, two complex numbers per register.
void sub_scaled(std::complex<double>* y, std::complex<double> a, const std::complex<double>* x, std::size_t n) {
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);                 // xr0 xi0 xr1 xi1
    __m256d vswap = _mm256_permute_pd(vx, 0b0101);            // xi0 xr0 xi1 xr1
    __m256d t1 = _mm256_mul_pd(ar, vx);                       // ar*xr, ar*xi
    __m256d t2 = _mm256_mul_pd(ai, vswap);                    // ai*xi, ai*xr
    __m256d prod = _mm256_addsub_pd(t1, t2);                  // ar*xr-ai*xi, ar*xi+ai*xr
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_sub_pd(vy, prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() - (a.real() * xr - a.imag() * xi), y[i].imag() - (a.real() * xi + a.imag() * xr)};
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

std::complex<double> dot_conj(const std::complex<double>* x, const std::complex<double>* y, std::size_t n) {
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* yd = reinterpret_cast<const double*>(y);
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    re = _mm256_fmadd_pd(vx, vy, re);                                 // xr*yr, xi*yi
    im = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0b0101), im);      // xr*yi, xi*yr
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(m, im);
  double sr = (r[0] + r[1]) + (r[2] + r[3]);
  double si = (m[0] - m[1]) + (m[2] - m[3]);
  for (; i < n; ++i) {
    sr += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    si += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {sr, si};
}

}  // namespace detline::kernels::avx2
