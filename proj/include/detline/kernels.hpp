#pragma once

// Row-operation kernels for the floating backends. Every kernel has a scalar
// reference implementation and, on x86-64 builds, an AVX2/FMA variant chosen
// at startup from cpuid. DETLINE_SIMD=scalar in the environment pins the
// reference path.

#include <complex>
#include <cstddef>

namespace detline::kernels {

enum class Isa { scalar, avx2 };

bool avx2_available();
Isa active_isa();
const char* isa_name(Isa isa);
// Throws std::invalid_argument when the requested ISA is not usable here.
void set_isa(Isa isa);

// y[i] -= a * x[i]
void sub_scaled(double* y, double a, const double* x, std::size_t n);
void sub_scaled(std::complex<double>* y, std::complex<double> a, const std::complex<double>* x, std::size_t n);

// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);
// sum_i conj(x[i]) * y[i]
std::complex<double> dot_conj(const std::complex<double>* x, const std::complex<double>* y, std::size_t n);

namespace scalar {
void sub_scaled(double* y, double a, const double* x, std::size_t n);
void sub_scaled(std::complex<double>* y, std::complex<double> a, const std::complex<double>* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
std::complex<double> dot_conj(const std::complex<double>* x, const std::complex<double>* y, std::size_t n);
}  // namespace scalar

#ifdef DETLINE_HAVE_AVX2
namespace avx2 {
void sub_scaled(double* y, double a, const double* x, std::size_t n);
void sub_scaled(std::complex<double>* y, std::complex<double> a, const std::complex<double>* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
std::complex<double> dot_conj(const std::complex<double>* x, const std::complex<double>* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace detline::kernels
