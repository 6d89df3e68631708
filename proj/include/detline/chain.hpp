#pragma once

#include <limits>
#include <vector>

#include "detline/local_system.hpp"
#include "detline/matrix.hpp"
#include "detline/subdivision.hpp"

namespace detline {

inline int parity_sign(int q) { return q % 2 == 0 ? 1 : -1; }

// acc * x^sign for sign = +-1.
template <class S>
S times_power(const S& acc, const S& x, int sign) {
  if (sign > 0) return S(acc * x);
  return S(acc / x);
}

// A bounded chain complex of finite-dimensional spaces split into blocks
// (one block per cell). Degrees run from lo to hi; negative degrees occur for
// regraded cochain complexes.
template <class S>
struct ChainComplex {
  int lo = 0;
  std::vector<std::vector<std::size_t>> blocks;  // [q - lo] -> block sizes
  std::vector<Matrix<S>> d;                      // [q - lo]: degree q -> q - 1

  int hi() const { return lo + int(blocks.size()) - 1; }
  bool has(int q) const { return q >= lo && q <= hi(); }
  std::size_t size(int q) const {
    if (!has(q)) return 0;
    std::size_t s = 0;
    for (auto b : blocks[q - lo]) s += b;
    return s;
  }
  std::size_t block_offset(int q, std::size_t block) const {
    std::size_t s = 0;
    for (std::size_t k = 0; k < block; ++k) s += blocks[q - lo][k];
    return s;
  }
  Matrix<S> boundary(int q) const {
    if (has(q)) return d[q - lo];
    return Matrix<S>(size(q - 1), size(q));
  }
};

template <class S>
void check_boundary_square(const ChainComplex<S>& c, ErrorCode code) {
  for (int q = c.lo + 1; q <= c.hi(); ++q) {
    Matrix<S> prod = c.boundary(q - 1) * c.boundary(q);
    bool zero;
    if constexpr (ScalarTraits<S>::exact) {
      zero = prod.is_zero();
    } else {
      double scale = std::max(1.0, ScalarTraits<S>::to_double(c.boundary(q - 1).max_abs()) *
                                       ScalarTraits<S>::to_double(c.boundary(q).max_abs()));
      zero = ScalarTraits<S>::to_double(prod.max_abs()) <= tolerance().flat * scale;
    }
    if (!zero) throw Error(code, "boundary squared is nonzero in degree " + std::to_string(q));
  }
}

// C_*(K, E) with block (face, cell) = sum of coeff * transport.
// Errors: BoundaryMismatch.
template <class S>
ChainComplex<S> twisted_chain_complex(const LocalSystem<S>& e) {
  const Complex& k = *e.complex();
  const std::size_t r = e.rank();
  ChainComplex<S> c;
  c.lo = 0;
  for (int q = 0; q <= k.top_dim(); ++q) c.blocks.push_back(std::vector<std::size_t>(k.count(q), r));
  for (int q = 0; q <= k.top_dim(); ++q) {
    Matrix<S> m(r * k.count(q - 1), r * k.count(q));
    if (q > 0)
      for (std::size_t i = 0; i < k.count(q); ++i)
        for (const auto& t : e.terms(q, int(i))) m.add_block(r * std::size_t(t.face), r * i, t.map, S(t.coeff));
    if constexpr (!ScalarTraits<S>::exact) {
      // Several terms on one (face, cell) pair can cancel (a lens 2-cell wraps
      // p times); what survives within a few ulps of the summands is zero.
      Matrix<double> mag(m.rows(), m.cols());
      if (q > 0)
        for (std::size_t i = 0; i < k.count(q); ++i)
          for (const auto& t : e.terms(q, int(i)))
            for (std::size_t a = 0; a < r; ++a)
              for (std::size_t b = 0; b < r; ++b)
                mag(r * std::size_t(t.face) + a, r * i + b) += std::abs(t.coeff) * abs_double(t.map(a, b));
      const double ulp = ScalarTraits<S>::to_double(std::numeric_limits<RealOf<S>>::epsilon());
      for (std::size_t a = 0; a < m.rows(); ++a)
        for (std::size_t b = 0; b < m.cols(); ++b)
          if (abs_double(m(a, b)) <= 64 * ulp * mag(a, b)) m(a, b) = S(0);
    }
    c.d.push_back(std::move(m));
  }
  check_boundary_square(c, ErrorCode::BoundaryMismatch);
  return c;
}

// D_{shift - q} = C_q with boundary the transpose of the coboundary. With
// shift 0 applied to C_*(E*) this is the cochain complex C^*(E).
template <class S>
ChainComplex<S> transpose_complex(const ChainComplex<S>& c, int shift) {
  ChainComplex<S> t;
  t.lo = shift - c.hi();
  for (int j = t.lo; j <= shift - c.lo; ++j) {
    const int q = shift - j;
    t.blocks.push_back(c.blocks[q - c.lo]);
    // D_j -> D_{j-1} is C_q -> C_{q+1}
    t.d.push_back(c.boundary(q + 1).transpose());
  }
  return t;
}

// Per-block scalars; the first basis vector of each block is scaled.
template <class S>
using Frame = std::vector<std::vector<S>>;

template <class S>
Frame<S> unit_frame(const ChainComplex<S>& c) {
  Frame<S> f;
  for (const auto& b : c.blocks) f.push_back(std::vector<S>(b.size(), S(1)));
  return f;
}

// Cycles whose classes form a basis of homology, together with the pivot
// columns of each boundary map (their images span the boundaries).
template <class S>
struct HomologyBasis {
  int lo = 0;
  std::vector<Matrix<S>> z;                          // [q - lo]
  std::vector<std::vector<std::size_t>> pivots;      // [q - lo]: pivot columns of d_q
  std::vector<Matrix<S>> bnd;                        // [q - lo]: basis of im d_{q+1}

  std::size_t betti(int q) const { return q >= lo && q - lo < int(z.size()) ? z[q - lo].cols() : 0; }
  std::vector<std::size_t> betti_numbers() const {
    std::vector<std::size_t> b;
    for (const auto& m : z) b.push_back(m.cols());
    return b;
  }
  bool acyclic() const {
    for (const auto& m : z)
      if (m.cols() != 0) return false;
    return true;
  }
};

template <class S>
HomologyBasis<S> boundary_data(const ChainComplex<S>& c) {
  HomologyBasis<S> h;
  h.lo = c.lo;
  for (int q = c.lo; q <= c.hi(); ++q) h.pivots.push_back(independent_columns(c.boundary(q)));
  for (int q = c.lo; q <= c.hi(); ++q) {
    Matrix<S> up = c.boundary(q + 1);
    std::vector<std::size_t> piv = q + 1 <= c.hi() ? h.pivots[q + 1 - c.lo] : std::vector<std::size_t>{};
    h.bnd.push_back(up.columns(piv));
  }
  return h;
}

// Deterministic basis: kernel vectors from the RREF, kept when independent
// of the boundaries and of earlier picks. Errors: IllConditioned.
template <class S>
HomologyBasis<S> twisted_homology(const ChainComplex<S>& c) {
  HomologyBasis<S> h = boundary_data(c);
  for (int q = c.lo; q <= c.hi(); ++q) {
    const Matrix<S>& b = h.bnd[q - c.lo];
    Matrix<S> ker = nullspace(c.boundary(q));
    if (ker.cols() == b.cols()) {
      h.z.push_back(Matrix<S>(c.size(q), 0));
      continue;
    }
    auto cols = independent_columns(hcat(b, ker));
    std::vector<std::size_t> pick;
    for (auto j : cols)
      if (j >= b.cols()) pick.push_back(j - b.cols());
    h.z.push_back(ker.columns(pick));
  }
  return h;
}

// Replaces the cycles of degree q by user data. Errors: BadHomologyBasis.
template <class S>
HomologyBasis<S> with_cycles(const ChainComplex<S>& c, HomologyBasis<S> h, int q, const Matrix<S>& cycles) {
  if (cycles.rows() != c.size(q)) throw Error(ErrorCode::BadHomologyBasis, "cycle vectors have the wrong length");
  if (cycles.cols() != h.betti(q))
    throw Error(ErrorCode::BadHomologyBasis, "expected " + std::to_string(h.betti(q)) + " classes in degree " + std::to_string(q));
  Matrix<S> image = c.boundary(q) * cycles;
  double scale = std::max(1.0, ScalarTraits<S>::to_double(cycles.max_abs()));
  if constexpr (ScalarTraits<S>::exact) {
    if (!image.is_zero()) throw Error(ErrorCode::BadHomologyBasis, "a listed vector is not a cycle");
  } else {
    if (ScalarTraits<S>::to_double(image.max_abs()) > tolerance().flat * scale)
      throw Error(ErrorCode::BadHomologyBasis, "a listed vector is not a cycle");
  }
  const Matrix<S>& b = h.bnd[q - h.lo];
  if (rank(hcat(b, cycles)) != b.cols() + cycles.cols())
    throw Error(ErrorCode::BadHomologyBasis, "listed classes are linearly dependent");
  h.z[q - h.lo] = cycles;
  return h;
}

// Coordinates of the classes of `cycles` in the basis of degree q.
template <class S>
Matrix<S> class_coordinates(const HomologyBasis<S>& h, int q, const Matrix<S>& cycles) {
  const Matrix<S>& b = h.bnd[q - h.lo];
  const Matrix<S>& z = h.z[q - h.lo];
  Matrix<S> x = solve_in_span(hcat(b, z), cycles, ErrorCode::BadHomologyBasis);
  return x.block(b.cols(), 0, z.cols(), cycles.cols());
}

// The scalar t with T(c(u)) = t * h, h = (x) (wedge z_q)^{(-1)^q}.
// Each degree contributes [d b_{q+1}, z_q, b_q / c_q]^{(-1)^{q+1}}, where
// b_q are the standard vectors at the pivot columns of d_q.
template <class S>
S t_coordinate(const ChainComplex<S>& c, const Frame<S>& frame, const HomologyBasis<S>& h) {
  S t(1);
  for (int q = c.lo; q <= c.hi(); ++q) {
    const std::size_t k = std::size_t(q - c.lo);
    Matrix<S> m = hcat(h.bnd[k], h.z[k]);
    // Standard columns at the pivots of d_q: drop those rows (up to sign).
    std::vector<bool> drop(c.size(q), false);
    for (auto p : h.pivots[k]) drop[p] = true;
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < drop.size(); ++r)
      if (!drop[r]) keep.push_back(r);
    if (keep.size() != m.cols())
      throw Error(ErrorCode::BadHomologyBasis, "basis size mismatch in degree " + std::to_string(q));
    Matrix<S> sq(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t j = 0; j < m.cols(); ++j) sq(r, j) = m(keep[r], j);
    S det = determinant(sq);
    if (det == S(0)) throw Error(ErrorCode::BadHomologyBasis, "degenerate basis in degree " + std::to_string(q));
    S vol(1);
    for (const auto& u : frame.at(k)) {
      if (u == S(0)) throw Error(ErrorCode::ZeroFrame, "frame has a zero entry");
      vol *= u;
    }
    S factor = det / vol;
    t = times_power(t, factor, parity_sign(q + 1));
  }
  return t;
}

// A degree-preserving map between complexes, one matrix per degree.
template <class S>
struct ChainMap {
  int lo = 0;
  std::vector<Matrix<S>> f;  // [q - lo]
  const Matrix<S>& at(int q) const { return f.at(q - lo); }
};

template <class S>
void check_chain_map(const ChainComplex<S>& from, const ChainComplex<S>& to, const ChainMap<S>& m) {
  for (int q = from.lo + 1; q <= from.hi(); ++q) {
    Matrix<S> a = to.boundary(q) * m.at(q);
    Matrix<S> b = m.at(q - 1) * from.boundary(q);
    if (!nearly_equal(a, b, tolerance().flat))
      throw Error(ErrorCode::BoundaryMismatch, "map does not commute with boundaries in degree " + std::to_string(q));
  }
}

// Determinant of the map on homology: prod_q det(M_q)^{(-1)^q}, M_q the
// coordinates of f(z_q) in the target basis. Errors: BadHomologyBasis.
template <class S>
S induced_factor(const ChainMap<S>& m, const HomologyBasis<S>& from, const HomologyBasis<S>& to) {
  S k(1);
  for (int q = from.lo; q < from.lo + int(from.z.size()); ++q) {
    if (from.betti(q) != to.betti(q))
      throw Error(ErrorCode::BadHomologyBasis, "map is not an isomorphism on homology in degree " + std::to_string(q));
    if (from.betti(q) == 0) continue;
    Matrix<S> coords = class_coordinates(to, q, m.at(q) * from.z[q - from.lo]);
    S det = determinant(coords);
    if (det == S(0)) throw Error(ErrorCode::BadHomologyBasis, "map is singular on homology in degree " + std::to_string(q));
    k = times_power(k, det, parity_sign(q));
  }
  return k;
}

// Subdivision inclusion i: a coarse cell goes to the sum of its oriented
// pieces, sections restricted to each piece's anchor gauge.
template <class S>
ChainMap<S> subdivision_chain_map(const LocalSystem<S>& e, const SubdivisionMap& s) {
  const Complex& coarse = *s.coarse;
  const Complex& fine = *s.fine;
  const std::size_t r = e.rank();
  ChainMap<S> m;
  for (int q = 0; q <= coarse.top_dim(); ++q) {
    Matrix<S> f(r * fine.count(q), r * coarse.count(q));
    for (std::size_t i = 0; i < coarse.count(q); ++i)
      for (auto [piece, sign] : s.pieces({q, int(i)})) {
        int w0 = fine.anchor_vertex({q, piece});
        f.add_block(r * std::size_t(piece), r * i, e.restriction(s.carrier_of({0, w0}), {q, int(i)}), S(sign));
      }
    m.f.push_back(std::move(f));
  }
  return m;
}

// Dual blocks as chains of the barycentric refinement. The anchor of every
// simplex of the block of D is b(D), which carries the gauge of D.
template <class S>
ChainMap<S> dual_block_map(const DualPairing& d, std::size_t rank) {
  if (!d.geometric) throw Error(ErrorCode::NoGeometricDual, "dual blocks exist only for simplicial input");
  const Complex& fine = *d.refinement->map->fine;
  const std::size_t r = rank;
  ChainMap<S> m;
  const auto id = Matrix<S>::identity(r);
  for (int p = 0; p <= d.n; ++p) {
    const int q = d.n - p;
    Matrix<S> f(r * fine.count(p), r * d.dual->count(p));
    for (std::size_t i = 0; i < d.dual->count(p); ++i)
      for (auto [simplex, sign] : d.blocks[q][i]) f.add_block(r * std::size_t(simplex), r * i, id, S(sign));
    m.f.push_back(std::move(f));
  }
  return m;
}

// Cap product with the fundamental cycle, C^p(E) -> C_{n-p}(E), as matrices
// from the cochain coordinates (E gauge) to chain coordinates.
// Front face [v0..vp], back face [vp..vn] of each oriented top simplex.
template <class S>
std::vector<Matrix<S>> cap_product(const LocalSystem<S>& e, const OrientedManifold& m) {
  const Complex& k = *m.complex;
  if (k.mode() != Mode::simplicial) throw Error(ErrorCode::ModeMismatch, "cap product needs a simplicial complex");
  const int n = m.n;
  const std::size_t r = e.rank();
  auto oriented = [&](const std::vector<int>& verts) {
    CellRef c = *k.find_simplex(verts);
    // sign of verts relative to the stored order
    const auto& stored = k.cell(c).vertices;
    std::vector<int> pos;
    for (int v : verts) pos.push_back(int(std::find(stored.begin(), stored.end(), v) - stored.begin()));
    int sign = 1;
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = a + 1; b < pos.size(); ++b)
        if (pos[a] > pos[b]) sign = -sign;
    return std::pair{c, sign};
  };
  std::vector<Matrix<S>> out;
  for (int p = 0; p <= n; ++p) {
    Matrix<S> cap(r * k.count(n - p), r * k.count(p));
    for (std::size_t t = 0; t < k.count(n); ++t) {
      const auto& v = k.cell(n, int(t)).vertices;
      auto [front, sf] = oriented(std::vector<int>(v.begin(), v.begin() + p + 1));
      auto [back, sb] = oriented(std::vector<int>(v.begin() + p, v.end()));
      Matrix<S> tr = e.transport(front, back, {n, int(t)});
      cap.add_block(r * std::size_t(back.index), r * std::size_t(front.index), tr, S(m.fundamental[t] * sf * sb));
    }
    out.push_back(std::move(cap));
  }
  return out;
}

}  // namespace detline
