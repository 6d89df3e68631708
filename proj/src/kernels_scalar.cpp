#include "detline/kernels.hpp"

namespace detline::kernels::scalar {

void sub_scaled(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] -= a * x[i];
}

void sub_scaled(std::complex<double>* y, std::complex<double> a, const std::complex<double>* x, std::size_t n) {
  // Written out so the rounding matches the FMA-free formula the AVX2 path uses.
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() - (ar * xr - ai * xi), y[i].imag() - (ar * xi + ai * xr)};
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

std::complex<double> dot_conj(const std::complex<double>* x, const std::complex<double>* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

}  // namespace detline::kernels::scalar
