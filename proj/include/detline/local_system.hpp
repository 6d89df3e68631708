#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "detline/complex.hpp"
#include "detline/matrix.hpp"
#include "detline/subdivision.hpp"

namespace detline {

// One attaching term of a cell onto a face: coeff * map, where map sends the
// fiber over the cell (cell gauge) to the fiber over the face (face gauge).
template <class S>
struct Term {
  int face = 0;
  int coeff = 0;
  Matrix<S> map;
};

template <class S>
bool nearly_equal(const Matrix<S>& a, const Matrix<S>& b, double tol) {
  if constexpr (ScalarTraits<S>::exact) {
    return a == b;
  } else {
    return relative_difference(a, b) <= tol;
  }
}

template <class S>
Matrix<S> checked_inverse(const Matrix<S>& a, const std::string& what) {
  try {
    return inverse(a);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular || e.code() == ErrorCode::IllConditioned)
      throw Error(ErrorCode::Singular, what + " is not invertible");
    throw;
  }
}

// Flat transport data over a complex. In simplicial mode the system is given
// by edge transports (lower vertex to higher vertex) and an optional change
// of gauge per cell; every restriction between a cell and any of its faces
// is derived from these. In CW mode only the attaching terms exist.
template <class S>
class LocalSystem {
 public:
  using TermTable = std::vector<std::vector<std::vector<Term<S>>>>;

  ComplexPtr complex() const { return complex_; }
  std::size_t rank() const { return rank_; }
  bool derived() const { return !edges_.empty() || (complex_->mode() == Mode::simplicial && complex_->count(1) == 0); }
  const std::vector<Term<S>>& terms(int q, int i) const { return terms_.at(q).at(i); }
  const std::vector<Matrix<S>>& edges() const { return edges_; }

  // Restriction of flat sections from `cell` to its face `face` (any
  // codimension), in the gauges of both cells.
  Matrix<S> restriction(CellRef face, CellRef cell) const {
    require_derived("restriction");
    Matrix<S> m = vertex_transport(complex_->anchor_vertex(cell), complex_->anchor_vertex(face));
    if (!gauge_.empty()) m = gauge_[face.dim][face.index] * m * gauge_inv_[cell.dim][cell.index];
    return m;
  }

  // Change of gauge from cell `from` to cell `to`, both faces of `common`.
  Matrix<S> transport(CellRef from, CellRef to, CellRef common) const {
    return restriction(to, common) * checked_inverse(restriction(from, common), "restriction");
  }

  // Transport between vertex gauges along the edge joining a and b.
  Matrix<S> vertex_transport(int a, int b) const {
    if (a == b) return Matrix<S>::identity(rank_);
    auto e = complex_->find_simplex({a, b});
    if (!e) throw Error(ErrorCode::InvalidIncidence, "vertices are not joined by an edge");
    return a < b ? edges_[e->index] : edge_inverse_[e->index];
  }

  static LocalSystem trivial(ComplexPtr c, std::size_t rank) {
    if (c->mode() == Mode::simplicial)
      return from_edges(c, rank, std::vector<Matrix<S>>(c->count(1), Matrix<S>::identity(rank)));
    TermTable t(std::size_t(c->top_dim() + 1));
    for (int q = 0; q <= c->top_dim(); ++q) {
      t[q].resize(c->count(q));
      if (q == 0) continue;
      for (std::size_t i = 0; i < c->count(q); ++i)
        for (const auto& f : c->faces(q, int(i))) t[q][i].push_back({f.face, f.coeff, Matrix<S>::identity(rank)});
    }
    return from_terms(c, rank, std::move(t));
  }

  // Simplicial generator mode. Errors: Singular, NotFlat.
  static LocalSystem from_edges(ComplexPtr c, std::size_t rank, std::vector<Matrix<S>> edges) {
    if (c->mode() != Mode::simplicial) throw Error(ErrorCode::ModeMismatch, "edge transports need a simplicial complex");
    if (edges.size() != c->count(1)) throw Error(ErrorCode::InvalidIncidence, "one transport per edge is required");
    LocalSystem e;
    e.complex_ = c;
    e.rank_ = rank;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (edges[k].rows() != rank || edges[k].cols() != rank)
        throw Error(ErrorCode::InvalidIncidence, "transport on '" + c->cell(1, int(k)).id + "' has wrong shape");
      e.edge_inverse_.push_back(checked_inverse(edges[k], "transport on '" + c->cell(1, int(k)).id + "'"));
    }
    e.edges_ = std::move(edges);
    e.check_cocycle();
    e.build_terms();
    return e;
  }

  // Attaching terms given per (face, cell) pair; CW mode, or simplicial
  // tables written out explicitly. Errors: Singular, NotFlat, InvalidIncidence.
  static LocalSystem from_terms(ComplexPtr c, std::size_t rank, TermTable terms) {
    terms.resize(std::size_t(c->top_dim() + 1));
    for (int q = 0; q <= c->top_dim(); ++q) terms[q].resize(c->count(q));
    for (int q = 1; q <= c->top_dim(); ++q)
      for (std::size_t i = 0; i < c->count(q); ++i) {
        std::map<int, int> sums;
        for (const auto& t : terms[q][i]) {
          if (t.map.rows() != rank || t.map.cols() != rank)
            throw Error(ErrorCode::InvalidIncidence, "transport onto a face of '" + c->cell(q, int(i)).id + "' has wrong shape");
          checked_inverse(t.map, "transport onto a face of '" + c->cell(q, int(i)).id + "'");
          sums[t.face] += t.coeff;
        }
        std::map<int, int> want;
        for (const auto& f : c->faces(q, int(i))) want[f.face] += f.coeff;
        for (const auto& [face, coeff] : want) {
          bool present = sums.count(face) > 0;
          if (!present && coeff != 0)
            throw Error(ErrorCode::InvalidIncidence, "missing transport from '" + c->cell(q, int(i)).id + "' to '" +
                                                         c->cell(q - 1, face).id + "'");
          if (present && sums[face] != coeff)
            throw Error(ErrorCode::InvalidIncidence, "term coefficients of '" + c->cell(q, int(i)).id +
                                                         "' do not sum to the incidence number");
        }
        for (const auto& [face, s] : sums)
          if (!want.count(face))
            throw Error(ErrorCode::InvalidIncidence, "transport given for a non-face of '" + c->cell(q, int(i)).id + "'");
      }
    LocalSystem e;
    e.complex_ = c;
    e.rank_ = rank;
    e.terms_ = std::move(terms);
    e.check_square(ErrorCode::NotFlat);
    return e;
  }

  // Explicit restriction table on a simplicial complex: edge transports are
  // read from (higher vertex, edge) pairs and every supplied pair must agree
  // with the derived restriction. Unlisted pairs default to the identity.
  static LocalSystem from_restrictions(ComplexPtr c, std::size_t rank,
                                       const std::vector<std::pair<std::pair<CellRef, CellRef>, Matrix<S>>>& table) {
    std::vector<Matrix<S>> edges(c->count(1), Matrix<S>::identity(rank));
    for (const auto& [pair, m] : table) {
      auto [face, cell] = pair;
      if (face.dim == 0 && cell.dim == 1) {
        const auto& v = c->cell(cell).vertices;
        int hi = std::max(v[0], v[1]);
        if (c->cell(face).vertices[0] == hi) edges[cell.index] = m;
      }
    }
    LocalSystem e = from_edges(c, rank, std::move(edges));
    for (const auto& [pair, m] : table) {
      auto [face, cell] = pair;
      if (!c->is_face(face, cell))
        throw Error(ErrorCode::InvalidIncidence, "'" + c->cell(face).id + "' is not a face of '" + c->cell(cell).id + "'");
      if (!nearly_equal(e.restriction(face, cell), m, tolerance().flat))
        throw Error(ErrorCode::NotFlat, "transport from '" + c->cell(cell).id + "' to '" + c->cell(face).id +
                                            "' violates the cocycle condition");
    }
    return e;
  }

  // Dual system: inverse-transposed transports.
  LocalSystem dual() const {
    LocalSystem d = *this;
    d.map_all([](const Matrix<S>& m) { return inverse_transpose(m); });
    return d;
  }

  // Rank-one system with transports det R.
  LocalSystem det() const {
    LocalSystem d = *this;
    d.rank_ = 1;
    d.map_all([](const Matrix<S>& m) {
      Matrix<S> x(1, 1);
      x(0, 0) = determinant(m);
      return x;
    });
    return d;
  }

  LocalSystem direct_sum(const LocalSystem& other) const {
    if (other.complex_ != complex_) throw Error(ErrorCode::ContextMismatch, "direct sum over different complexes");
    if (derived() && other.derived()) {
      std::vector<Matrix<S>> edges;
      for (std::size_t k = 0; k < edges_.size(); ++k) edges.push_back(block_diag(edges_[k], other.edges_[k]));
      LocalSystem s = from_edges(complex_, rank_ + other.rank_, std::move(edges));
      if (!gauge_.empty() || !other.gauge_.empty()) {
        auto g = cell_table([&](CellRef c) { return block_diag(gauge(c), other.gauge(c)); });
        s = s.gauge_transform(g);
      }
      return s;
    }
    TermTable t = terms_;
    for (std::size_t q = 0; q < t.size(); ++q)
      for (std::size_t i = 0; i < t[q].size(); ++i) {
        const auto& o = other.terms_[q][i];
        if (o.size() != t[q][i].size()) throw Error(ErrorCode::ContextMismatch, "direct sum of differently attached systems");
        for (std::size_t k = 0; k < o.size(); ++k) {
          if (o[k].face != t[q][i][k].face || o[k].coeff != t[q][i][k].coeff)
            throw Error(ErrorCode::ContextMismatch, "direct sum of differently attached systems");
          t[q][i][k].map = block_diag(t[q][i][k].map, o[k].map);
        }
      }
    return from_terms(complex_, rank_ + other.rank_, std::move(t));
  }

  // New coordinates x' = g_D x on every fiber.
  LocalSystem gauge_transform(const std::vector<std::vector<Matrix<S>>>& g) const {
    LocalSystem out = *this;
    std::vector<std::vector<Matrix<S>>> inv(g.size());
    for (std::size_t q = 0; q < g.size(); ++q)
      for (const auto& m : g[q]) inv[q].push_back(checked_inverse(m, "gauge change"));
    for (std::size_t q = 1; q < out.terms_.size(); ++q)
      for (std::size_t i = 0; i < out.terms_[q].size(); ++i)
        for (auto& t : out.terms_[q][i]) t.map = g[q - 1][t.face] * t.map * inv[q][i];
    if (derived()) {
      if (out.gauge_.empty()) {
        out.gauge_ = g;
        out.gauge_inv_ = inv;
      } else {
        for (std::size_t q = 0; q < g.size(); ++q)
          for (std::size_t i = 0; i < g[q].size(); ++i) {
            out.gauge_[q][i] = g[q][i] * gauge_[q][i];
            out.gauge_inv_[q][i] = gauge_inv_[q][i] * inv[q][i];
          }
      }
    }
    return out;
  }

  Matrix<S> gauge(CellRef c) const {
    return gauge_.empty() ? Matrix<S>::identity(rank_) : gauge_[c.dim][c.index];
  }

  // The same bundle on a subdivision: every fine vertex uses the gauge of
  // its carrier cell.
  LocalSystem on_subdivision(const SubdivisionMap& s) const {
    require_derived("transport to a subdivision");
    if (s.coarse != complex_) throw Error(ErrorCode::ContextMismatch, "subdivision of a different complex");
    const Complex& fine = *s.fine;
    std::vector<Matrix<S>> edges;
    for (std::size_t k = 0; k < fine.count(1); ++k) {
      const auto& v = fine.cell(1, int(k)).vertices;
      int lo = std::min(v[0], v[1]), hi = std::max(v[0], v[1]);
      CellRef ce = s.carrier_of({1, int(k)});
      CellRef c_lo = s.carrier_of({0, lo}), c_hi = s.carrier_of({0, hi});
      edges.push_back(transport(c_lo, c_hi, ce));
    }
    return from_edges(s.fine, rank_, std::move(edges));
  }

  // The same bundle on the dual decomposition, each dual cell in the gauge
  // of its primal cell.
  LocalSystem on_dual(const DualPairing& d) const {
    if (d.primal.complex != complex_) throw Error(ErrorCode::ContextMismatch, "dual of a different complex");
    const Complex& c = *complex_;
    const int n = d.n;
    TermTable t(std::size_t(n + 1));
    for (int p = 0; p <= n; ++p) t[p].resize(c.count(n - p));
    for (int q = 1; q <= n; ++q)
      for (std::size_t j = 0; j < c.count(q); ++j)
        for (const auto& term : terms_[q][j]) {
          int s = d.pair_sign({q, int(j)}, {q - 1, term.face});
          t[n - q + 1][term.face].push_back({int(j), s * term.coeff, checked_inverse(term.map, "transport")});
        }
    return from_terms(d.dual, rank_, std::move(t));
  }

 private:
  void require_derived(const char* what) const {
    if (!derived()) throw Error(ErrorCode::ModeMismatch, std::string(what) + " needs a simplicial system");
  }

  template <class F>
  std::vector<std::vector<Matrix<S>>> cell_table(F f) const {
    std::vector<std::vector<Matrix<S>>> out(std::size_t(complex_->top_dim() + 1));
    for (int q = 0; q <= complex_->top_dim(); ++q)
      for (std::size_t i = 0; i < complex_->count(q); ++i) out[q].push_back(f(CellRef{q, int(i)}));
    return out;
  }

  template <class F>
  void map_all(F f) {
    for (auto& layer : terms_)
      for (auto& cell : layer)
        for (auto& t : cell) t.map = f(t.map);
    for (auto& m : edges_) m = f(m);
    for (auto& m : edge_inverse_) m = f(m);
    for (auto& layer : gauge_)
      for (auto& m : layer) m = f(m);
    for (auto& layer : gauge_inv_)
      for (auto& m : layer) m = f(m);
  }

  void check_cocycle() const {
    const Complex& c = *complex_;
    for (std::size_t i = 0; i < c.count(2); ++i) {
      auto v = c.cell(2, int(i)).vertices;
      std::sort(v.begin(), v.end());
      Matrix<S> direct = vertex_transport(v[0], v[2]);
      Matrix<S> composite = vertex_transport(v[1], v[2]) * vertex_transport(v[0], v[1]);
      if (!nearly_equal(direct, composite, tolerance().flat))
        throw Error(ErrorCode::NotFlat, "holonomy around '" + c.cell(2, int(i)).id + "' is not trivial");
    }
  }

  void build_terms() {
    const Complex& c = *complex_;
    terms_.assign(std::size_t(c.top_dim() + 1), {});
    for (int q = 0; q <= c.top_dim(); ++q) {
      terms_[q].resize(c.count(q));
      if (q == 0) continue;
      for (std::size_t i = 0; i < c.count(q); ++i)
        for (const auto& f : c.faces(q, int(i)))
          terms_[q][i].push_back({f.face, f.coeff, restriction({q - 1, f.face}, {q, int(i)})});
    }
  }

  // Boundary squared, evaluated cell by cell.
  void check_square(ErrorCode code) const {
    const Complex& c = *complex_;
    for (int q = 2; q <= c.top_dim(); ++q)
      for (std::size_t i = 0; i < c.count(q); ++i) {
        std::map<int, Matrix<S>> acc;
        RealOf<S> scale(1);
        for (const auto& t : terms_[q][i])
          for (const auto& u : terms_[q - 1][t.face]) {
            auto it = acc.try_emplace(u.face, Matrix<S>(rank_, rank_)).first;
            Matrix<S> prod = u.map * t.map;
            it->second.add_block(0, 0, prod, S(t.coeff * u.coeff));
            auto m = prod.max_abs();
            if (m > scale) scale = m;
          }
        for (const auto& [face, m] : acc) {
          bool zero;
          if constexpr (ScalarTraits<S>::exact)
            zero = m.is_zero();
          else
            zero = ScalarTraits<S>::to_double(m.max_abs() / scale) <= tolerance().flat;
          if (!zero)
            throw Error(code, "boundary of boundary of '" + c.cell(q, int(i)).id + "' is nonzero at '" +
                                  c.cell(q - 2, face).id + "'");
        }
      }
  }

  ComplexPtr complex_;
  std::size_t rank_ = 0;
  TermTable terms_;
  std::vector<Matrix<S>> edges_, edge_inverse_;
  std::vector<std::vector<Matrix<S>>> gauge_, gauge_inv_;
};

}  // namespace detline
