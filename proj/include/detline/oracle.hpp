#pragma once

#include <vector>

#include "detline/detline.hpp"

namespace detline {

// Per-degree, per-block Hermitian positive-definite forms, indexed like the
// blocks of a ChainComplex.
using InnerProduct = std::vector<std::vector<Matrix<Cplx>>>;

struct SpectralReport {
  int lo = 0;
  std::vector<std::vector<double>> eigenvalues;  // ascending, per degree
  std::vector<double> det_prime;                 // product of nonzero eigenvalues
  std::vector<std::size_t> zero_modes;
  std::vector<std::size_t> betti;
  std::vector<double> harmonic_volume;  // |det| of the harmonic parts of the cycles, per degree
  double harmonic_metric = 1;           // norm of the reference element in the harmonic metric
  double rs_metric = 1;                 // harmonic metric times the det' correction
  double t_metric = 1;                  // norm induced through T by an orthonormal frame
};

template <class S>
ChainComplex<Cplx> to_cplx(const ChainComplex<S>& c) {
  ChainComplex<Cplx> out;
  out.lo = c.lo;
  out.blocks = c.blocks;
  for (const auto& m : c.d) {
    Matrix<Cplx> x(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) x(i, j) = ScalarTraits<S>::to_complex(m(i, j));
    out.d.push_back(std::move(x));
  }
  return out;
}

template <class S>
HomologyBasis<Cplx> to_cplx(const HomologyBasis<S>& h) {
  auto conv = [](const Matrix<S>& m) {
    Matrix<Cplx> x(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) x(i, j) = ScalarTraits<S>::to_complex(m(i, j));
    return x;
  };
  HomologyBasis<Cplx> out;
  out.lo = h.lo;
  out.pivots = h.pivots;
  for (const auto& m : h.z) out.z.push_back(conv(m));
  for (const auto& m : h.bnd) out.bnd.push_back(conv(m));
  return out;
}

InnerProduct identity_inner_product(const ChainComplex<Cplx>& c);

// Per-cell forms [q][i] reindexed for the cochain complex (degree -q).
InnerProduct cochain_inner_product(const std::vector<std::vector<Matrix<Cplx>>>& per_cell);

// conj(H^{-1}) per block: the form on E* dual to H on E.
std::vector<std::vector<Matrix<Cplx>>> dual_inner_product(const std::vector<std::vector<Matrix<Cplx>>>& per_cell);

// Random Hermitian positive-definite forms per cell, rank r.
std::vector<std::vector<Matrix<Cplx>>> random_inner_product(const Complex& k, std::size_t rank, unsigned long long seed);

// Finite-dimensional Ray-Singer metric of the reference element of det H
// (the wedge of the basis cycles h.z). Errors: NotPositiveDefinite.
SpectralReport rs_metric_finite(const ChainComplex<Cplx>& c, const HomologyBasis<Cplx>& h, const InnerProduct& ip);

struct Thm53Report {
  double product = 0;    // ||x g_E||^RS ||y g_E*||^RS
  double canonical = 0;  // <x g_E (x) y g_E*>_E
  bool equal = false;
};

template <class S>
Thm53Report thm53_product_check(BundlePtr<S> e_ptr, BundlePtr<S> e_star_ptr,
                                const std::vector<std::vector<Matrix<Cplx>>>& ip_e,
                                const std::vector<std::vector<Matrix<Cplx>>>& ip_e_star, const S& x, const S& y,
                                double rel = 1e-8) {
  const Bundle<S>& e = *e_ptr;
  const Bundle<S>& e_star = *e_star_ptr;
  require_dual_pair(e, e_star);
  auto shape_ok = [&](const std::vector<std::vector<Matrix<Cplx>>>& ip) {
    const Complex& k = *e.complex();
    if (int(ip.size()) != k.top_dim() + 1) return false;
    for (int q = 0; q <= k.top_dim(); ++q) {
      if (ip[q].size() != k.count(q)) return false;
      for (const auto& m : ip[q])
        if (m.rows() != e.system().rank() || m.cols() != e.system().rank()) return false;
    }
    return true;
  };
  if (!shape_ok(ip_e) || !shape_ok(ip_e_star))
    throw Error(ErrorCode::DualMismatch, "inner products do not match the cells and rank of the systems");
  auto a = rs_metric_finite(to_cplx(e.cochains()), to_cplx(e.cohomology()), cochain_inner_product(ip_e));
  auto b = rs_metric_finite(to_cplx(e_star.cochains()), to_cplx(e_star.cohomology()), cochain_inner_product(ip_e_star));
  Thm53Report r;
  r.product = abs_double(x) * a.rs_metric * abs_double(y) * b.rs_metric;
  r.canonical = ScalarTraits<S>::to_double(canonical_metric(DetLineElement<S>{e_ptr, LineKind::cohomological, x},
                                                            DetLineElement<S>{e_star_ptr, LineKind::cohomological, y}));
  r.equal = std::abs(r.product - r.canonical) <= rel * std::max(std::abs(r.product), std::abs(r.canonical));
  return r;
}

// |1 - lambda| from the two-cell circle. Errors: TrivialHolonomy.
double closed_form_circle(Cplx lambda);

// Torsion modulus of L(p, q) with character zeta from the four-cell complex.
// Errors: NotAcyclic, Usage (zeta^p != 1 or gcd(p, q) != 1).
double closed_form_lens(int p, int q, Cplx zeta);

}  // namespace detline
