#pragma once

#include <random>
#include <vector>

#include "detline/local_system.hpp"

namespace detline {

// n-vertex circle; edges [i, i+1] and the closing edge [0, n-1].
ComplexPtr circle_complex(int n);
// Boundary of the (d+1)-simplex.
ComplexPtr sphere_complex(int d);
// Four-cell CW structure e0..e3 of L(p, q), incidences (0, p, 0).
ComplexPtr lens_complex(int p);
// Seven-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
ComplexPtr torus_complex();

// r with q r = 1 mod p.
int lens_inverse(int p, int q);

// Lattice step (dx, dy) of the torus edge from vertex a to vertex b.
std::pair<int, int> torus_step(int a, int b);

// Holonomy lambda on the closing edge, identity elsewhere.
template <class S>
LocalSystem<S> circle_system(ComplexPtr c, const Matrix<S>& lambda) {
  const std::size_t r = lambda.rows();
  std::vector<Matrix<S>> edges(c->count(1), Matrix<S>::identity(r));
  const int n = int(c->count(0));
  edges[c->find_simplex({0, n - 1})->index] = lambda;
  return LocalSystem<S>::from_edges(c, r, std::move(edges));
}

template <class S>
LocalSystem<S> circle_system(ComplexPtr c, const S& lambda) {
  return circle_system(c, Matrix<S>::from_rows({{lambda}}));
}

// Rank-one character zeta on the four-cell lens complex.
template <class S>
LocalSystem<S> lens_system(ComplexPtr c, int p, int q, const S& zeta) {
  using Table = typename LocalSystem<S>::TermTable;
  auto one = [](const S& x) { return Matrix<S>::from_rows({{x}}); };
  const int r = lens_inverse(p, q);
  Table t(4);
  for (int k = 0; k < 4; ++k) t[k].resize(1);
  t[1][0] = {{0, -1, one(S(1))}, {0, 1, one(zeta)}};
  S z(1);
  for (int j = 0; j < p; ++j) {
    t[2][0].push_back({0, 1, one(z)});
    z *= zeta;
  }
  t[3][0] = {{0, -1, one(S(1))}, {0, 1, one(ipow(zeta, r))}};
  return LocalSystem<S>::from_terms(c, 1, std::move(t));
}

// Commuting generators a, b of the torus lattice.
template <class S>
LocalSystem<S> torus_system(ComplexPtr c, const Matrix<S>& a, const Matrix<S>& b) {
  const std::size_t r = a.rows();
  Matrix<S> ai = checked_inverse(a, "torus generator a");
  Matrix<S> bi = checked_inverse(b, "torus generator b");
  std::vector<Matrix<S>> edges;
  for (std::size_t k = 0; k < c->count(1); ++k) {
    const auto& v = c->cell(1, int(k)).vertices;
    auto [dx, dy] = torus_step(v[0], v[1]);
    Matrix<S> m = Matrix<S>::identity(r);
    for (int i = 0; i < std::abs(dx); ++i) m = (dx > 0 ? a : ai) * m;
    for (int i = 0; i < std::abs(dy); ++i) m = (dy > 0 ? b : bi) * m;
    edges.push_back(m);
  }
  return LocalSystem<S>::from_edges(c, r, std::move(edges));
}

template <class S>
S random_scalar(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::bernoulli_distribution sign(0.5);
  if constexpr (ScalarTraits<S>::exact) {
    std::uniform_int_distribution<int> num(1, 9), den(1, 5);
    S x = S(num(rng)) / S(den(rng));
    return sign(rng) ? x : S(-x);
  } else if constexpr (ScalarTraits<S>::is_complex) {
    std::uniform_real_distribution<double> arg(0.0, 6.283185307179586);
    return ScalarTraits<S>::from_complex(std::polar(u(rng), arg(rng)));
  } else {
    double x = u(rng);
    return ScalarTraits<S>::from_complex(Cplx(sign(rng) ? x : -x));
  }
}

// Well-conditioned random invertible matrix: diagonal dominant perturbation.
template <class S>
Matrix<S> random_invertible(std::size_t r, std::mt19937_64& rng) {
  Matrix<S> m(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      S x = random_scalar<S>(rng);
      m(i, j) = i == j ? S(x * S(3)) : S(x / S(4));
    }
  return m;
}

// Gauge-trivial flat system: transport g_b g_a^{-1} on every edge [a, b].
// Not unimodular in general; its homology is that of trivial coefficients.
template <class S>
LocalSystem<S> random_gauge_trivial(ComplexPtr c, std::size_t r, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::vector<Matrix<S>> g, gi;
  for (std::size_t v = 0; v < c->count(0); ++v) {
    g.push_back(random_invertible<S>(r, rng));
    gi.push_back(checked_inverse(g.back(), "vertex gauge"));
  }
  std::vector<Matrix<S>> edges;
  for (std::size_t k = 0; k < c->count(1); ++k) {
    const auto& v = c->cell(1, int(k)).vertices;
    edges.push_back(g[std::size_t(v[1])] * gi[std::size_t(v[0])]);
  }
  return LocalSystem<S>::from_edges(c, r, std::move(edges));
}

// Per-cell random gauge change of any system.
template <class S>
LocalSystem<S> random_regauge(const LocalSystem<S>& e, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  const Complex& k = *e.complex();
  std::vector<std::vector<Matrix<S>>> g(std::size_t(k.top_dim() + 1));
  for (int q = 0; q <= k.top_dim(); ++q)
    for (std::size_t i = 0; i < k.count(q); ++i) g[q].push_back(random_invertible<S>(e.rank(), rng));
  return e.gauge_transform(g);
}

}  // namespace detline
