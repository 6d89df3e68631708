#pragma once

#include <cmath>
#include <deque>

#include "detline/duality.hpp"

namespace detline {

template <class S>
RealOf<S> real_sqrt(const RealOf<S>& x) {
  using std::sqrt;
  using boost::multiprecision::sqrt;
  if constexpr (ScalarTraits<S>::exact) {
    return Rational(std::sqrt(x.template convert_to<double>()));
  } else {
    return sqrt(x);
  }
}

// ||x h_E||^2 = <x h_E (x) D_E(x h_E)>_E = |x|^2 |d_E| / |t_E t_E*|.
template <class S>
RealOf<S> pr_norm_squared(const Duality<S>& dd, const S& x) {
  return canonical_metric(DetLineElement<S>{dd.e.primal, LineKind::homological, x},
                          DetLineElement<S>{dd.e_star.primal, LineKind::homological, S(dd.d * x)});
}

template <class S>
RealOf<S> pr_norm(const Duality<S>& dd, const S& x) {
  return real_sqrt<S>(pr_norm_squared(dd, x));
}

// PR norm of x h_E computed on one simplicial complex with the cap-product
// duality. Used on refinements, where building tau* would mean a second
// subdivision.
template <class S>
RealOf<S> pr_norm_cap(const OrientedManifold& m, BundlePtr<S> e, BundlePtr<S> e_star, const S& x) {
  S d = cap_duality_scalar(m, *e, *e_star);
  return real_sqrt<S>(canonical_metric(DetLineElement<S>{e, LineKind::homological, x},
                                       DetLineElement<S>{e_star, LineKind::homological, S(d * x)}));
}

template <class S>
struct RecipeParts {
  RealOf<S> alpha_over_beta, beta_gamma, alpha_over_gamma, product;
};

// Three-number recipe for ||T(alpha)||^2 with alpha = a (x) u^eps over tau,
// beta = b (x) v^eps over (tau*, E), gamma = c (x) w^eps over (tau*, E*).
template <class S>
RecipeParts<S> pr_norm_recipe(const Duality<S>& dd, const Frame<S>& u, const S& a, const Frame<S>& v, const S& b,
                              const Frame<S>& w, const S& c) {
  if (dd.pairing->n % 2 == 0) throw Error(ErrorCode::EvenDimension, "the recipe needs odd dimension");
  for (const auto* f : {&u, &v, &w})
    for (const auto& layer : *f)
      for (const auto& x : layer)
        if (x == S(0)) throw Error(ErrorCode::ZeroFrame, "frame has a zero entry");
  if (a == S(0) || b == S(0) || c == S(0)) throw Error(ErrorCode::ZeroFrame, "zero coefficient");
  const int n = dd.pairing->n;
  RecipeParts<S> r;
  // T_tau(alpha) = lambda T_tau*(beta) in det H(E)
  r.alpha_over_beta = abs_of(S(a * dd.e.primal->t(u) / (b * dd.e.dual->t(v) * dd.e.rho)));
  S bg = b * c;
  for (int p = 0; p <= n; ++p)
    for (std::size_t i = 0; i < v.at(p).size(); ++i) {
      S x = v[p][i] * w[p][i];
      bg = times_power(bg, x, parity_sign(p));
    }
  r.beta_gamma = abs_of(bg);
  // pairs (D, D*): D of dimension q, D* of dimension n - q
  S ag = a / c;
  for (int q = 0; q <= n; ++q)
    for (std::size_t i = 0; i < u.at(q).size(); ++i) {
      S x = u[q][i] * w.at(n - q).at(i);
      ag = times_power(ag, x, parity_sign(q));
    }
  r.alpha_over_gamma = abs_of(ag);
  r.product = r.alpha_over_beta * r.beta_gamma * r.alpha_over_gamma;
  return r;
}

// Cohomological PR norm of x g_E.
template <class S>
RealOf<S> pr_norm_cohomological(const Duality<S>& dd, const S& x) {
  S c = cohomological_duality_scalar(dd);
  return real_sqrt<S>(canonical_metric(DetLineElement<S>{dd.e.primal, LineKind::cohomological, x},
                                       DetLineElement<S>{dd.e_star.primal, LineKind::cohomological, S(c * x)}));
}

// Flat metric on det E, normalized to 1 on the first cell of each
// component: m_cell = |det R| m_face. Errors: NotUnimodular.
template <class S>
std::vector<std::vector<RealOf<S>>> flat_metric(const LocalSystem<S>& e) {
  using R = RealOf<S>;
  const Complex& c = *e.complex();
  std::vector<std::vector<std::vector<std::pair<CellRef, R>>>> adj(std::size_t(c.top_dim() + 1));
  for (int q = 0; q <= c.top_dim(); ++q) adj[q].resize(c.count(q));
  for (int q = 1; q <= c.top_dim(); ++q)
    for (std::size_t i = 0; i < c.count(q); ++i)
      for (const auto& t : e.terms(q, int(i))) {
        R dm = abs_of(determinant(t.map));
        adj[q][i].push_back({CellRef{q - 1, t.face}, R(1) / dm});
        adj[q - 1][t.face].push_back({CellRef{q, int(i)}, dm});
      }
  std::vector<std::vector<R>> m(adj.size());
  std::vector<std::vector<bool>> seen(adj.size());
  for (std::size_t q = 0; q < adj.size(); ++q) {
    m[q].assign(adj[q].size(), R(0));
    seen[q].assign(adj[q].size(), false);
  }
  for (int q0 = 0; q0 <= c.top_dim(); ++q0)
    for (std::size_t i0 = 0; i0 < c.count(q0); ++i0) {
      if (seen[q0][i0]) continue;
      seen[q0][i0] = true;
      m[q0][i0] = R(1);
      std::deque<CellRef> queue{{q0, int(i0)}};
      while (!queue.empty()) {
        CellRef a = queue.front();
        queue.pop_front();
        for (const auto& [b, ratio] : adj[a.dim][a.index]) {
          R want = ratio * m[a.dim][a.index];
          if (!seen[b.dim][b.index]) {
            seen[b.dim][b.index] = true;
            m[b.dim][b.index] = want;
            queue.push_back(b);
          } else {
            R have = m[b.dim][b.index];
            R gap = have > want ? have - want : want - have;
            bool ok;
            if constexpr (ScalarTraits<S>::exact)
              ok = gap == R(0);
            else
              ok = ScalarTraits<S>::to_double(gap / want) < tolerance().unimodular;
            if (!ok) throw Error(ErrorCode::NotUnimodular, "det E admits no flat metric (at '" + c.cell(b).id + "')");
          }
        }
      }
    }
  return m;
}

// Reidemeister metric: ||T(mu)|| = 1 with mu the unit-norm volumes of a flat
// metric on det E. `scale` multiplies the flat metric (irrelevant when chi = 0).
template <class S>
RealOf<S> reidemeister_norm(const Bundle<S>& e, const S& x, const RealOf<S>& scale = RealOf<S>(1)) {
  auto m = flat_metric(e.system());
  Frame<S> mu(m.size());
  for (std::size_t q = 0; q < m.size(); ++q)
    for (const auto& v : m[q]) mu[q].push_back(S(RealOf<S>(1) / (v * scale)));
  return abs_of(S(x / e.t(mu)));
}

template <class S>
struct NormPair {
  RealOf<S> pr, reidemeister;
};

template <class S>
NormPair<S> pr_equals_reidemeister_check(const Duality<S>& dd, const S& x) {
  RealOf<S> r = reidemeister_norm(*dd.e.primal, x);
  return {pr_norm(dd, x), r};
}

template <class S>
struct IsometrySides {
  RealOf<S> image, source;
};

// ||phi^(x)||_F against ||x||_E.
template <class S>
IsometrySides<S> pr_isometry_check(const LineBundleIso<S>& phi, const Duality<S>& de, const Duality<S>& df, const S& x) {
  S s = correspondence_hat(phi, *de.e.primal, *df.e.primal);
  return {pr_norm(df, S(s * x)), pr_norm(de, x)};
}

}  // namespace detline
