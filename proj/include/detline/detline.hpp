#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "detline/chain.hpp"
#include "detline/local_system.hpp"

namespace detline {

template <class S>
struct TorsionScalar {
  S value;            // determined up to sign
  RealOf<S> abs;
};

// Reported torsion is the reciprocal of the T-coordinate, so that an
// acyclic 0 -> k -(A)-> k -> 0 has torsion |det A|.
template <class S>
TorsionScalar<S> canonical_torsion(const ChainComplex<S>& c, const Frame<S>& f, const HomologyBasis<S>& h) {
  S v = S(1) / t_coordinate(c, f, h);
  return {v, abs_of(v)};
}

template <class S>
bool equal_mod_sign(const S& a, const S& b, double rel) {
  if constexpr (ScalarTraits<S>::exact) {
    return a == b || a == -b;
  } else {
    double scale = std::max(abs_double(a), abs_double(b));
    double d = std::min(abs_double(S(a - b)), abs_double(S(a + b)));
    return d <= rel * scale;
  }
}

template <class S>
double relative_gap(const S& a, const S& b) {
  double scale = std::max({abs_double(a), abs_double(b), 1e-300});
  return std::abs(abs_double(a) - abs_double(b)) / scale;
}

// One flat bundle over one complex with its reference data: the chain
// complex C_*(E) and homology basis h_E, and the cochain complex
// C^*(E) = C_*(E*)^T (degree -q holds C^q) with cohomology basis g_E.
template <class S>
class Bundle {
 public:
  static std::shared_ptr<const Bundle> make(const LocalSystem<S>& e) {
    auto b = std::shared_ptr<Bundle>(new Bundle());
    b->system_ = e;
    b->chains_ = twisted_chain_complex(e);
    b->homology_ = twisted_homology(b->chains_);
    b->t_unit_ = t_coordinate(b->chains_, unit_frame(b->chains_), b->homology_);
    b->cochains_ = transpose_complex(twisted_chain_complex(e.dual()), 0);
    b->cohomology_ = twisted_homology(b->cochains_);
    b->t_coh_unit_ = t_coordinate(b->cochains_, unit_frame(b->cochains_), b->cohomology_);
    return b;
  }

  const LocalSystem<S>& system() const { return system_; }
  ComplexPtr complex() const { return system_.complex(); }
  const ChainComplex<S>& chains() const { return chains_; }
  const HomologyBasis<S>& homology() const { return homology_; }
  const ChainComplex<S>& cochains() const { return cochains_; }
  const HomologyBasis<S>& cohomology() const { return cohomology_; }

  S t_unit() const { return t_unit_; }
  S t_coh_unit() const { return t_coh_unit_; }
  // Frames are indexed by cell: [q][i].
  S t(const Frame<S>& cells) const { return t_coordinate(chains_, cells, homology_); }
  S t_coh(const Frame<S>& cells) const {
    Frame<S> f;
    for (int j = cochains_.lo; j <= cochains_.hi(); ++j) f.push_back(cells.at(std::size_t(-j)));
    return t_coordinate(cochains_, f, cohomology_);
  }
  Frame<S> unit() const { return unit_frame(chains_); }

 private:
  Bundle() = default;
  LocalSystem<S> system_;
  ChainComplex<S> chains_, cochains_;
  HomologyBasis<S> homology_, cohomology_;
  S t_unit_{1}, t_coh_unit_{1};
};

template <class S>
using BundlePtr = std::shared_ptr<const Bundle<S>>;

enum class LineKind { homological, cohomological };

// x = coordinate * h_E (homological) or coordinate * g_E (cohomological).
template <class S>
struct DetLineElement {
  BundlePtr<S> bundle;
  LineKind kind = LineKind::homological;
  S coordinate{1};
};

template <class S>
DetLineElement<S> reference_element(BundlePtr<S> b, LineKind kind, S coordinate = S(1)) {
  return {b, kind, coordinate};
}

// T(c(u)) as an element.
template <class S>
DetLineElement<S> torsion_element(BundlePtr<S> b, const Frame<S>& u) {
  return {b, LineKind::homological, b->t(u)};
}

template <class S>
void require_dual_pair(const Bundle<S>& e, const Bundle<S>& f) {
  if (e.complex() != f.complex()) throw Error(ErrorCode::ContextMismatch, "elements live over different complexes");
  if (e.system().rank() != f.system().rank()) throw Error(ErrorCode::ContextMismatch, "bundles have different ranks");
}

// {h_E, g_{E*}}: prod_q det(g_q^T z_q)^{(-1)^q}, pairing chains of E with
// cochains of E* (functionals on C_*(E)).
template <class S>
S reference_pairing(const Bundle<S>& e, const Bundle<S>& e_star) {
  require_dual_pair(e, e_star);
  const auto& h = e.homology();
  const auto& g = e_star.cohomology();
  S p(1);
  for (int q = 0; q <= e.chains().hi(); ++q) {
    const auto& z = h.z[q - h.lo];
    const auto& w = g.z[-q - g.lo];
    if (z.cols() != w.cols()) throw Error(ErrorCode::ContextMismatch, "homology and cohomology ranks differ");
    if (z.cols() == 0) continue;
    S d = determinant(w.transpose() * z);
    p = times_power(p, d, parity_sign(q));
  }
  return p;
}

// Evaluation pairing L_.(E) x L^.(E*) -> k.
template <class S>
S evaluation_pairing(const DetLineElement<S>& x, const DetLineElement<S>& y) {
  if (x.kind != LineKind::homological || y.kind != LineKind::cohomological)
    throw Error(ErrorCode::ContextMismatch, "evaluation pairs a homological with a cohomological element");
  return x.coordinate * y.coordinate * reference_pairing(*x.bundle, *y.bundle);
}

// Canonical metric on L(E) (x) L(E*): the element T c_E(1) (x) T c_{E*}(1) with
// unit frames in dual gauges has value 1.
template <class S>
RealOf<S> canonical_metric(const DetLineElement<S>& x, const DetLineElement<S>& y) {
  require_dual_pair(*x.bundle, *y.bundle);
  if (x.kind != y.kind) throw Error(ErrorCode::ContextMismatch, "metric pairs elements of the same kind");
  if (x.kind == LineKind::homological)
    return abs_of(S(x.coordinate * y.coordinate / (x.bundle->t_unit() * y.bundle->t_unit())));
  return abs_of(S(x.coordinate * y.coordinate / (x.bundle->t_coh_unit() * y.bundle->t_coh_unit())));
}

// Per-cell scalars of an isomorphism det E -> det F in anchor gauges.
template <class S>
struct LineBundleIso {
  std::vector<std::vector<S>> phi;  // [q][i]

  LineBundleIso scaled(const S& t) const {
    LineBundleIso out = *this;
    for (auto& layer : out.phi)
      for (auto& v : layer) v *= t;
    return out;
  }
  LineBundleIso then(const LineBundleIso& next) const {
    LineBundleIso out = *this;
    for (std::size_t q = 0; q < phi.size(); ++q)
      for (std::size_t i = 0; i < phi[q].size(); ++i) out.phi[q][i] = next.phi[q][i] * phi[q][i];
    return out;
  }
};

namespace detail {

template <class S>
void iso_relations(const LocalSystem<S>& e, const LocalSystem<S>& f,
                   std::vector<std::vector<std::vector<std::pair<CellRef, S>>>>& adj) {
  const Complex& c = *e.complex();
  adj.assign(std::size_t(c.top_dim() + 1), {});
  for (int q = 0; q <= c.top_dim(); ++q) adj[q].resize(c.count(q));
  for (int q = 1; q <= c.top_dim(); ++q)
    for (std::size_t i = 0; i < c.count(q); ++i) {
      const auto& te = e.terms(q, int(i));
      const auto& tf = f.terms(q, int(i));
      if (te.size() != tf.size()) throw Error(ErrorCode::ContextMismatch, "systems attach cells differently");
      for (std::size_t k = 0; k < te.size(); ++k) {
        if (te[k].face != tf[k].face || te[k].coeff != tf[k].coeff)
          throw Error(ErrorCode::ContextMismatch, "systems attach cells differently");
        // phi_face * det R^E = det R^F * phi_cell
        S ratio = determinant(tf[k].map) / determinant(te[k].map);
        adj[q][i].push_back({CellRef{q - 1, te[k].face}, ratio});
        adj[q - 1][te[k].face].push_back({CellRef{q, int(i)}, S(1) / ratio});
      }
    }
}

template <class S>
bool scalar_close(const S& a, const S& b) {
  if constexpr (ScalarTraits<S>::exact) {
    return a == b;
  } else {
    double scale = std::max({1.0, abs_double(a), abs_double(b)});
    return abs_double(S(a - b)) <= tolerance().flat * scale;
  }
}

}  // namespace detail

// Propagates phi from the first cell of each component. Errors:
// NotAMorphism when the propagated values disagree, ZeroFrame for 0.
template <class S>
LineBundleIso<S> propagate_iso(const LocalSystem<S>& e, const LocalSystem<S>& f, const S& seed) {
  if (e.complex() != f.complex()) throw Error(ErrorCode::ContextMismatch, "systems over different complexes");
  if (seed == S(0)) throw Error(ErrorCode::ZeroFrame, "isomorphism seed is zero");
  std::vector<std::vector<std::vector<std::pair<CellRef, S>>>> adj;
  detail::iso_relations(e, f, adj);
  const Complex& c = *e.complex();
  LineBundleIso<S> out;
  std::vector<std::vector<bool>> seen(std::size_t(c.top_dim() + 1));
  out.phi.resize(seen.size());
  for (int q = 0; q <= c.top_dim(); ++q) {
    seen[q].assign(c.count(q), false);
    out.phi[q].assign(c.count(q), S(0));
  }
  for (int q0 = 0; q0 <= c.top_dim(); ++q0)
    for (std::size_t i0 = 0; i0 < c.count(q0); ++i0) {
      if (seen[q0][i0]) continue;
      seen[q0][i0] = true;
      out.phi[q0][i0] = seed;
      std::deque<CellRef> queue{{q0, int(i0)}};
      while (!queue.empty()) {
        CellRef a = queue.front();
        queue.pop_front();
        for (const auto& [b, ratio] : adj[a.dim][a.index]) {
          S want = ratio * out.phi[a.dim][a.index];
          if (!seen[b.dim][b.index]) {
            seen[b.dim][b.index] = true;
            out.phi[b.dim][b.index] = want;
            queue.push_back(b);
          } else if (!detail::scalar_close(out.phi[b.dim][b.index], want)) {
            throw Error(ErrorCode::NotAMorphism, "det E and det F are not isomorphic as flat bundles (at '" +
                                                     c.cell(b).id + "')");
          }
        }
      }
    }
  return out;
}

// Errors: NotAMorphism.
template <class S>
void check_iso(const LocalSystem<S>& e, const LocalSystem<S>& f, const LineBundleIso<S>& phi) {
  std::vector<std::vector<std::vector<std::pair<CellRef, S>>>> adj;
  detail::iso_relations(e, f, adj);
  const Complex& c = *e.complex();
  for (int q = 0; q <= c.top_dim(); ++q)
    for (std::size_t i = 0; i < c.count(q); ++i) {
      if (phi.phi.at(q).at(i) == S(0)) throw Error(ErrorCode::ZeroFrame, "isomorphism vanishes on '" + c.cell(q, int(i)).id + "'");
      for (const auto& [b, ratio] : adj[q][i])
        if (!detail::scalar_close(phi.phi[b.dim][b.index], S(ratio * phi.phi[q][i])))
          throw Error(ErrorCode::NotAMorphism, "compatibility fails between '" + c.cell(q, int(i)).id + "' and '" +
                                                   c.cell(b).id + "'");
    }
}

// Scalar s with phi^(h_E) = s h_F: the frame u maps to u * phi.
template <class S>
S correspondence_hat(const LineBundleIso<S>& phi, const Bundle<S>& e, const Bundle<S>& f) {
  if (e.complex() != f.complex()) throw Error(ErrorCode::ContextMismatch, "bundles over different complexes");
  check_iso(e.system(), f.system(), phi);
  return f.t(phi.phi) / e.t_unit();
}

// Cohomological twin phi-check on L^.(E) -> L^.(F).
template <class S>
S correspondence_check_map(const LineBundleIso<S>& phi, const Bundle<S>& e, const Bundle<S>& f) {
  if (e.complex() != f.complex()) throw Error(ErrorCode::ContextMismatch, "bundles over different complexes");
  check_iso(e.system(), f.system(), phi);
  return f.t_coh(phi.phi) / e.t_coh_unit();
}

// The adjoint det F* -> det E* has the same scalars in dual gauges.
template <class S>
LineBundleIso<S> adjoint(const LineBundleIso<S>& phi) {
  return phi;
}

template <class S>
struct AdjointSides {
  RealOf<S> lhs, rhs;
};

// <x (x) psi^(y)>_E and <phi^(x) (x) y>_F for x in L(E), y in L(F*).
template <class S>
AdjointSides<S> correspondence_adjoint_identity(const LineBundleIso<S>& phi, BundlePtr<S> e, BundlePtr<S> e_star,
                                                BundlePtr<S> f, BundlePtr<S> f_star, const S& x, const S& y,
                                                LineKind kind = LineKind::homological) {
  auto psi = adjoint(phi);
  S s_phi, s_psi;
  if (kind == LineKind::homological) {
    s_phi = correspondence_hat(phi, *e, *f);
    s_psi = correspondence_hat(psi, *f_star, *e_star);
  } else {
    s_phi = correspondence_check_map(phi, *e, *f);
    s_psi = correspondence_check_map(psi, *f_star, *e_star);
  }
  AdjointSides<S> out;
  out.lhs = canonical_metric(DetLineElement<S>{e, kind, x}, DetLineElement<S>{e_star, kind, S(s_psi * y)});
  out.rhs = canonical_metric(DetLineElement<S>{f, kind, S(s_phi * x)}, DetLineElement<S>{f_star, kind, y});
  return out;
}

// Frame on a subdivision: a fine cell carries the volume of its carrier,
// written in the gauge of its anchor vertex (restricted by det R).
template <class S>
Frame<S> transport_frame(const Frame<S>& u, const LocalSystem<S>& e, const SubdivisionMap& s) {
  const Complex& fine = *s.fine;
  Frame<S> out(std::size_t(fine.top_dim() + 1));
  for (int q = 0; q <= fine.top_dim(); ++q)
    for (std::size_t i = 0; i < fine.count(q); ++i) {
      CellRef c = s.carrier_of({q, int(i)});
      CellRef a = s.carrier_of({0, fine.anchor_vertex({q, int(i)})});
      out[q].push_back(S(u.at(c.dim).at(c.index) * determinant(e.restriction(a, c))));
    }
  return out;
}

// Isomorphisms are flat, so a fine cell takes the value at the carrier of
// its anchor vertex, whose gauge it uses.
template <class S>
LineBundleIso<S> transport_iso(const LineBundleIso<S>& phi, const SubdivisionMap& s) {
  const Complex& fine = *s.fine;
  LineBundleIso<S> out;
  out.phi.resize(std::size_t(fine.top_dim() + 1));
  for (int q = 0; q <= fine.top_dim(); ++q)
    for (std::size_t i = 0; i < fine.count(q); ++i) {
      CellRef c = s.carrier_of({0, fine.anchor_vertex({q, int(i)})});
      out.phi[q].push_back(phi.phi.at(c.dim).at(c.index));
    }
  return out;
}

// The acyclic quotient D = C(tau') / i C(tau), based by standard vectors
// complementary to the image of i, and the identity
// t_{tau'}(u') = t_tau(u) * kappa_i * t_D(u', u).
template <class S>
struct QuotientData {
  S t_fine, t_coarse, kappa, t_quotient;  // t_quotient includes the frame factors
  bool holds = false;
};

template <class S>
QuotientData<S> quotient_identity(const Bundle<S>& coarse, const Bundle<S>& fine, const ChainMap<S>& i,
                                  const Frame<S>& u, const Frame<S>& u_fine) {
  const auto& c = coarse.chains();
  const auto& cf = fine.chains();
  const std::size_t r = coarse.system().rank();
  ChainComplex<S> d;
  d.lo = 0;
  std::vector<std::vector<std::size_t>> comp;
  S frame_part(1);
  for (int q = 0; q <= cf.hi(); ++q) {
    const Matrix<S>& iq = i.at(q);
    const std::size_t nf = cf.size(q), nc = c.size(q);
    auto cols = independent_columns(hcat(iq, Matrix<S>::identity(nf)));
    std::vector<std::size_t> pick;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k < nc && cols[k] != k) throw Error(ErrorCode::NotASubdivision, "subdivision map is not injective");
      if (cols[k] >= nc) pick.push_back(cols[k] - nc);
    }
    if (cols.size() != nf) throw Error(ErrorCode::NotASubdivision, "subdivision map has the wrong rank");
    comp.push_back(pick);
    d.blocks.push_back(std::vector<std::size_t>(pick.size(), 1));
    // [i c(u) | E] relative to c'(u')
    Matrix<S> m(nf, nf);
    Matrix<S> ic = iq;
    for (std::size_t cell = 0; cell < nc / std::max<std::size_t>(r, 1); ++cell)
      for (std::size_t row = 0; row < nf; ++row) ic(row, cell * r) *= u.at(q).at(cell);
    m.set_block(0, 0, ic);
    for (std::size_t k = 0; k < pick.size(); ++k) m(pick[k], nc + k) = S(1);
    S vol(1);
    for (const auto& x : u_fine.at(q)) vol *= x;
    S f = determinant(m) / vol;
    frame_part = times_power(frame_part, f, parity_sign(q + 1));
  }
  for (int q = 0; q <= cf.hi(); ++q) {
    Matrix<S> dq(comp[q > 0 ? q - 1 : 0].size(), comp[q].size());
    if (q > 0 && !comp[q].empty() && !comp[q - 1].empty()) {
      Matrix<S> basis = hcat(i.at(q - 1), Matrix<S>::identity(cf.size(q - 1)).columns(comp[q - 1]));
      Matrix<S> v = cf.boundary(q).columns(comp[q]);
      Matrix<S> x = solve_in_span(basis, v, ErrorCode::NotASubdivision);
      dq = x.block(c.size(q - 1), 0, comp[q - 1].size(), comp[q].size());
    }
    if (q == 0) dq = Matrix<S>(0, comp[0].size());
    d.d.push_back(std::move(dq));
  }
  auto hd = twisted_homology(d);
  if (!hd.acyclic()) throw Error(ErrorCode::NotASubdivision, "quotient complex is not acyclic");
  QuotientData<S> out;
  out.t_quotient = t_coordinate(d, unit_frame(d), hd) * frame_part;
  out.t_fine = fine.t(u_fine);
  out.t_coarse = coarse.t(u);
  out.kappa = induced_factor(i, coarse.homology(), fine.homology());
  out.holds = equal_mod_sign(out.t_fine, S(out.t_coarse * out.kappa * out.t_quotient), 1e-9);
  return out;
}

template <class S>
struct CorrespondenceCheck {
  S coarse_scalar;       // phi^ over tau in the bases of tau
  S fine_scalar;         // phi^ over tau' pulled back to the bases of tau
  QuotientData<S> e_side, f_side;
  bool volumes_agree = false;  // t_D(E; u', u) = t_D(F; u' phi', u phi)
  bool ok = false;
};

// Invariance under one subdivision: phi^ computed on both complexes and
// the quotient volumes compared. Errors: NotASubdivision, NotAMorphism.
template <class S>
CorrespondenceCheck<S> correspondence_check(const LineBundleIso<S>& phi, BundlePtr<S> e, BundlePtr<S> f,
                                            const SubdivisionMap& s) {
  if (s.coarse != e->complex()) throw Error(ErrorCode::NotASubdivision, "subdivision of a different complex");
  auto ef = Bundle<S>::make(e->system().on_subdivision(s));
  auto ff = Bundle<S>::make(f->system().on_subdivision(s));
  auto phi_f = transport_iso(phi, s);
  auto ie = subdivision_chain_map(e->system(), s);
  auto iff = subdivision_chain_map(f->system(), s);
  CorrespondenceCheck<S> out;
  out.coarse_scalar = correspondence_hat(phi, *e, *f);
  S kappa_e = induced_factor(ie, e->homology(), ef->homology());
  S kappa_f = induced_factor(iff, f->homology(), ff->homology());
  out.fine_scalar = correspondence_hat(phi_f, *ef, *ff) * kappa_e / kappa_f;
  auto u = e->unit();
  out.e_side = quotient_identity(*e, *ef, ie, u, transport_frame(u, e->system(), s));
  out.f_side = quotient_identity(*f, *ff, iff, phi.phi, transport_frame(phi.phi, f->system(), s));
  out.volumes_agree = equal_mod_sign(out.e_side.t_quotient, out.f_side.t_quotient, 1e-9);
  out.ok = out.volumes_agree && out.e_side.holds && out.f_side.holds &&
           equal_mod_sign(out.coarse_scalar, out.fine_scalar, 1e-9);
  return out;
}

}  // namespace detline
