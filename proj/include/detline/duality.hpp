#pragma once

#include <memory>

#include "detline/detline.hpp"
#include "detline/subdivision.hpp"

namespace detline {

// A system on tau together with the same bundle on tau*, and the factor
// rho with h_{tau*} = rho * h_tau (both identified inside the barycentric
// refinement through the subdivision map and the dual-block map).
template <class S>
struct DualSide {
  BundlePtr<S> primal;
  BundlePtr<S> dual;
  S rho{1};
};

// Errors: NoGeometricDual (CW input with homology), BoundaryMismatch when the
// dual blocks fail to commute with the boundaries.
template <class S>
DualSide<S> make_dual_side(const DualPairing& d, const LocalSystem<S>& e) {
  DualSide<S> side;
  side.primal = Bundle<S>::make(e);
  side.dual = Bundle<S>::make(e.on_dual(d));
  if (!d.geometric) {
    if (!side.primal->homology().acyclic() || !side.dual->homology().acyclic())
      throw Error(ErrorCode::NoGeometricDual,
                  "CW input: homology of tau and tau* cannot be identified without dual blocks");
    return side;
  }
  const SubdivisionMap& s = *d.refinement->map;
  auto fine = Bundle<S>::make(e.on_subdivision(s));
  auto i = subdivision_chain_map(e, s);
  auto j = dual_block_map<S>(d, e.rank());
  check_chain_map(side.primal->chains(), fine->chains(), i);
  check_chain_map(side.dual->chains(), fine->chains(), j);
  S ki = induced_factor(i, side.primal->homology(), fine->homology());
  S kj = induced_factor(j, side.dual->homology(), fine->homology());
  side.rho = kj / ki;
  return side;
}

// D_E on homological lines of an odd-dimensional manifold.
// D_E(h_E) = d h_{E*} with d = t_{tau*,E*}(1) rho_{E*} / t_{tau,E}(1).
template <class S>
struct Duality {
  std::shared_ptr<const DualPairing> pairing;
  DualSide<S> e, e_star;
  S d{1};       // D_E
  S d_star{1};  // D_{E*}
};

template <class S>
Duality<S> make_duality(std::shared_ptr<const DualPairing> pairing, const LocalSystem<S>& e, bool require_odd = true) {
  if (require_odd && pairing->n % 2 == 0)
    throw Error(ErrorCode::EvenDimension, "homological duality on determinant lines needs odd dimension");
  Duality<S> out;
  out.pairing = pairing;
  out.e = make_dual_side(*pairing, e);
  out.e_star = make_dual_side(*pairing, e.dual());
  out.d = out.e_star.dual->t_unit() * out.e_star.rho / out.e.primal->t_unit();
  out.d_star = out.e.dual->t_unit() * out.e.rho / out.e_star.primal->t_unit();
  return out;
}

// The same scalar through the cap product on a single simplicial complex:
// prod_q (det P_q / det K_q)^{(-1)^q}, K_q the classes of the caps of a
// cohomology basis of H^{n-q}(E), P_q its evaluation on h_{E*, n-q}.
template <class S>
S cap_duality_scalar(const OrientedManifold& m, const Bundle<S>& e, const Bundle<S>& e_star) {
  if (m.n % 2 == 0) throw Error(ErrorCode::EvenDimension, "homological duality on determinant lines needs odd dimension");
  require_dual_pair(e, e_star);
  auto caps = cap_product(e.system(), m);
  const auto& g = e.cohomology();
  S d(1);
  for (int q = 0; q <= m.n; ++q) {
    if (e.homology().betti(q) == 0) continue;
    const Matrix<S>& cocycles = g.z[-(m.n - q) - g.lo];
    Matrix<S> k = class_coordinates(e.homology(), q, caps[m.n - q] * cocycles);
    Matrix<S> p = cocycles.transpose() * e_star.homology().z[m.n - q];
    S ratio = determinant(p) / determinant(k);
    d = times_power(d, ratio, parity_sign(q));
  }
  return d;
}

// Cohomological D_E scalar: D^coh_E(g_E) = c g_{E*},
// c = {h_{E*}, g_E} / (D_{E*} {h_E, g_{E*}}).
template <class S>
S cohomological_duality_scalar(const Duality<S>& dd) {
  S pi_e = reference_pairing(*dd.e.primal, *dd.e_star.primal);
  S pi_e_star = reference_pairing(*dd.e_star.primal, *dd.e.primal);
  return pi_e_star / (dd.d_star * pi_e);
}

template <class S>
struct SquareSides {
  S lhs, rhs;
};

// psi^ o D_F o phi^ against D_E; the two sides of the naturality square.
template <class S>
SquareSides<S> duality_square_check(const LineBundleIso<S>& phi, const Duality<S>& de, const Duality<S>& df) {
  S s_phi = correspondence_hat(phi, *de.e.primal, *df.e.primal);
  S s_psi = correspondence_hat(adjoint(phi), *df.e_star.primal, *de.e_star.primal);
  return {s_psi * df.d * s_phi, de.d};
}

// Metric value of the even-dimensional duality element. Optional frames w on
// (tau, E*) and v on (tau*, E*) rescale the intersection gauges.
template <class S>
RealOf<S> poincare_element_even(const Duality<S>& dd, const Frame<S>* w = nullptr, const Frame<S>* v = nullptr) {
  if (dd.pairing->n % 2 != 0) throw Error(ErrorCode::OddDimension, "the duality element lives in even dimension");
  const auto& star = dd.e_star;
  S num = w ? star.primal->t(*w) : star.primal->t_unit();
  S den = (v ? star.dual->t(*v) : star.dual->t_unit()) * star.rho;
  S value = num / den;
  auto slot = [](const Frame<S>& f, S& acc, bool invert) {
    for (std::size_t q = 0; q < f.size(); ++q)
      for (const auto& x : f[q]) {
        bool up = (q % 2 == 0) != invert;
        acc = up ? S(acc * x) : S(acc / x);
      }
  };
  if (w) slot(*w, value, true);
  if (v) slot(*v, value, false);
  return abs_of(value);
}

// For a based complex C and odd n, D_j = C_{n-j}^* satisfies
// t_D = t_C * prod_i det(G_i)^{(-1)^i}, G_i pairing H^i-classes of D with
// H_i-classes of C.
template <class S>
struct AlgebraicDuality {
  S t_c, t_d, sigma;
  bool holds = false;
};

template <class S>
AlgebraicDuality<S> algebraic_duality_check(const ChainComplex<S>& c, int n) {
  if (n % 2 == 0) throw Error(ErrorCode::EvenDimension, "the algebraic duality is stated for odd n");
  ChainComplex<S> d = transpose_complex(c, n);
  auto hc = twisted_homology(c);
  auto hd = twisted_homology(d);
  AlgebraicDuality<S> out;
  out.t_c = t_coordinate(c, unit_frame(c), hc);
  out.t_d = t_coordinate(d, unit_frame(d), hd);
  out.sigma = S(1);
  for (int i = c.lo; i <= c.hi(); ++i) {
    const auto& z = hc.z[i - hc.lo];
    if (z.cols() == 0) continue;
    const auto& g = hd.z[(n - i) - hd.lo];
    S det = determinant(g.transpose() * z);
    out.sigma = times_power(out.sigma, det, parity_sign(i));
  }
  out.holds = equal_mod_sign(out.t_d, S(out.t_c * out.sigma), 1e-9);
  return out;
}

}  // namespace detline
