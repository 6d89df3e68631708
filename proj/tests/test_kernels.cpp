#include <catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "detline/kernels.hpp"
#include "detline/matrix.hpp"

using namespace detline;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<Cplx> random_cvec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Cplx> v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::set_isa(saved); }
};

}  // namespace

TEST_CASE("scalar and AVX2 row kernels agree", "[kernels]") {
  if (!kernels::avx2_available()) SKIP("no AVX2 on this machine");
#ifdef DETLINE_HAVE_AVX2
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 70; ++n) {
    auto x = random_vec(n, rng), y = random_vec(n, rng);
    auto y1 = y, y2 = y;
    kernels::scalar::sub_scaled(y1.data(), 0.37, x.data(), n);
    kernels::avx2::sub_scaled(y2.data(), 0.37, x.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (1 + std::abs(y1[i])));
    double d1 = kernels::scalar::dot(x.data(), y.data(), n);
    double d2 = kernels::avx2::dot(x.data(), y.data(), n);
    CHECK(std::abs(d1 - d2) <= 1e-12 * (1 + std::abs(d1)));

    auto cx = random_cvec(n, rng), cy = random_cvec(n, rng);
    auto c1 = cy, c2 = cy;
    const Cplx a(0.3, -1.1);
    kernels::scalar::sub_scaled(c1.data(), a, cx.data(), n);
    kernels::avx2::sub_scaled(c2.data(), a, cx.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(c1[i] - c2[i]) <= 1e-14 * (1 + std::abs(c1[i])));
    Cplx e1 = kernels::scalar::dot_conj(cx.data(), cy.data(), n);
    Cplx e2 = kernels::avx2::dot_conj(cx.data(), cy.data(), n);
    CHECK(std::abs(e1 - e2) <= 1e-12 * (1 + std::abs(e1)));
  }
#endif
}

TEST_CASE("determinants do not depend on the active kernel", "[kernels]") {
  if (!kernels::avx2_available()) SKIP("no AVX2 on this machine");
  IsaGuard guard;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + std::size_t(trial % 9);
    Matrix<Cplx> m(n, n);
    Matrix<double> r(n, n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = {u(rng), u(rng)};
        r(i, j) = u(rng);
      }
    kernels::set_isa(kernels::Isa::scalar);
    Cplx ds = determinant(m);
    double rs = determinant(r);
    kernels::set_isa(kernels::Isa::avx2);
    Cplx dv = determinant(m);
    double rv = determinant(r);
    CHECK(std::abs(ds - dv) <= 1e-12 * std::abs(ds));
    CHECK_THAT(rv, WithinRel(rs, 1e-12));
  }
}

TEST_CASE("exact determinant of a small integer matrix", "[kernels]") {
  auto m = Matrix<Rational>::from_rows({{2, 1, 0}, {1, 3, 1}, {0, 1, 4}});
  // cofactor expansion: 2 (12 - 1) - 1 (4 - 0) = 18
  CHECK(determinant(m) == Rational(18));
  auto s = Matrix<Rational>::from_rows({{1, 2}, {2, 4}});
  CHECK(determinant(s) == Rational(0));
  CHECK(rank(s) == 1);
}
