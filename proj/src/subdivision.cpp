#include "detline/subdivision.hpp"

#include <algorithm>
#include <set>

#include "detline/errors.hpp"
#include "detline/matrix.hpp"

namespace detline {

namespace {

std::vector<CellRef> maximal_cells(const Complex& c) {
  std::vector<CellRef> out;
  for (int q = 0; q <= c.top_dim(); ++q)
    for (std::size_t i = 0; i < c.count(q); ++i)
      if (q == c.top_dim() || c.cofaces(q, int(i)).empty()) out.push_back({q, int(i)});
  return out;
}

void require_simplicial(const Complex& c, const char* what) {
  if (c.mode() != Mode::simplicial) throw Error(ErrorCode::ModeMismatch, std::string(what) + " needs a simplicial complex");
}

// Carriers, orientation pieces of a freshly built fine complex.
void finish_map(SubdivisionMap& s) {
  const Complex& fine = *s.fine;
  const Complex& coarse = *s.coarse;
  s.carrier.assign(std::size_t(fine.top_dim() + 1), {});
  s.pieces_.assign(std::size_t(coarse.top_dim() + 1), {});
  for (int q = 0; q <= coarse.top_dim(); ++q) s.pieces_[q].assign(coarse.count(q), {});
  for (int q = 0; q <= fine.top_dim(); ++q) {
    s.carrier[q].resize(fine.count(q));
    for (std::size_t i = 0; i < fine.count(q); ++i) {
      std::set<int> support;
      for (int w : fine.cell(q, int(i)).vertices)
        for (auto [v, weight] : s.position.at(w)) support.insert(v);
      auto car = coarse.find_simplex(std::vector<int>(support.begin(), support.end()));
      if (!car) throw Error(ErrorCode::NotASubdivision, "fine simplex '" + fine.cell(q, int(i)).id + "' has no carrier");
      s.carrier[q][i] = *car;
      if (car->dim == q) {
        int o = s.orientation({q, int(i)});
        if (o == 0) throw Error(ErrorCode::NotASubdivision, "degenerate fine simplex '" + fine.cell(q, int(i)).id + "'");
        s.pieces_[q][car->index].push_back({int(i), o});
      }
    }
  }
}

}  // namespace

int SubdivisionMap::orientation(CellRef fine_cell) const {
  CellRef car = carrier_of(fine_cell);
  if (car.dim != fine_cell.dim) return 0;
  const auto& fv = fine->cell(fine_cell).vertices;
  const auto& cv = coarse->cell(car).vertices;
  Matrix<Rational> w(fv.size(), cv.size());
  for (std::size_t r = 0; r < fv.size(); ++r)
    for (auto [v, weight] : position.at(fv[r])) {
      auto it = std::find(cv.begin(), cv.end(), v);
      w(r, std::size_t(it - cv.begin())) = Rational(weight);
    }
  Rational d = determinant(w);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

std::vector<std::pair<int, int>> SubdivisionMap::pieces(CellRef coarse_cell) const {
  return pieces_.at(coarse_cell.dim).at(coarse_cell.index);
}

std::shared_ptr<const SubdivisionMap> barycentric_subdivision(ComplexPtr c) {
  require_simplicial(*c, "barycentric subdivision");
  auto s = std::make_shared<SubdivisionMap>();
  s->coarse = c;
  std::vector<int> offset(std::size_t(c->top_dim() + 2), 0);
  for (int q = 0; q <= c->top_dim(); ++q) offset[q + 1] = offset[q] + int(c->count(q));
  std::vector<std::string> labels;
  for (int q = 0; q <= c->top_dim(); ++q)
    for (std::size_t i = 0; i < c->count(q); ++i) {
      labels.push_back("b(" + c->cell(q, int(i)).id + ")");
      std::vector<std::pair<int, long>> pos;
      for (int v : c->cell(q, int(i)).vertices) pos.push_back({v, 1});
      s->position.push_back(pos);
    }
  // Every maximal flag of every maximal simplex.
  std::vector<std::vector<int>> flags;
  for (CellRef top : maximal_cells(*c)) {
    auto verts = c->cell(top).vertices;
    std::sort(verts.begin(), verts.end());
    do {
      std::vector<int> flag;
      for (std::size_t k = 1; k <= verts.size(); ++k) {
        auto sub = std::vector<int>(verts.begin(), verts.begin() + long(k));
        CellRef ref = *c->find_simplex(sub);
        flag.push_back(offset[ref.dim] + ref.index);
      }
      flags.push_back(std::move(flag));
    } while (std::next_permutation(verts.begin(), verts.end()));
  }
  s->fine = std::make_shared<const Complex>(Complex::from_simplices(labels.size(), flags, labels));
  finish_map(*s);
  return s;
}

OrientedManifold transport_orientation(const OrientedManifold& m, const SubdivisionMap& s) {
  OrientedManifold out;
  out.complex = s.fine;
  out.n = m.n;
  out.fundamental.assign(s.fine->count(m.n), 0);
  for (std::size_t i = 0; i < out.fundamental.size(); ++i) {
    CellRef car = s.carrier_of({m.n, int(i)});
    out.fundamental[i] = m.fundamental.at(car.index) * s.orientation({m.n, int(i)});
  }
  return out;
}

Refinement barycentric_subdivision(const OrientedManifold& m) {
  auto s = barycentric_subdivision(m.complex);
  return {transport_orientation(m, *s), s};
}

std::shared_ptr<const SubdivisionMap> split_edge(ComplexPtr c, int edge) {
  require_simplicial(*c, "edge split");
  if (edge < 0 || std::size_t(edge) >= c->count(1)) throw Error(ErrorCode::NotASubdivision, "no such edge");
  auto s = std::make_shared<SubdivisionMap>();
  s->coarse = c;
  const auto& ev = c->cell(1, edge).vertices;
  const int a = ev[0], b = ev[1];
  const int mid = int(c->vertex_count());
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < c->vertex_count(); ++v) {
    labels.push_back(c->vertex_label(int(v)));
    s->position.push_back({{int(v), 1}});
  }
  labels.push_back("m(" + c->cell(1, edge).id + ")");
  s->position.push_back({{a, 1}, {b, 1}});
  std::vector<std::vector<int>> simplices;
  for (CellRef top : maximal_cells(*c)) {
    auto verts = c->cell(top).vertices;
    bool has_a = std::count(verts.begin(), verts.end(), a) > 0;
    bool has_b = std::count(verts.begin(), verts.end(), b) > 0;
    if (!(has_a && has_b)) {
      simplices.push_back(verts);
      continue;
    }
    auto left = verts, right = verts;
    std::replace(left.begin(), left.end(), b, mid);
    std::replace(right.begin(), right.end(), a, mid);
    simplices.push_back(left);
    simplices.push_back(right);
  }
  s->fine = std::make_shared<const Complex>(Complex::from_simplices(labels.size(), simplices, labels));
  finish_map(*s);
  return s;
}

Refinement split_edge(const OrientedManifold& m, int edge) {
  auto s = split_edge(m.complex, edge);
  return {transport_orientation(m, *s), s};
}

std::string DualPairing::common_point(CellRef primal_cell) const {
  return "b(" + primal.complex->cell(primal_cell).id + ")";
}

int DualPairing::pair_sign(CellRef coface, CellRef face) const {
  const auto& m = sign.at(coface.dim).at(coface.index);
  auto it = m.find(face.index);
  if (it == m.end()) throw Error(ErrorCode::DualMismatch, "cells are not incident");
  return it->second;
}

namespace {

// Layout shared by both constructions: ids, anchors and face lists of tau*
// from the incidence signs.
ComplexPtr assemble_dual(const OrientedManifold& m, const std::vector<std::vector<std::map<int, int>>>& sign) {
  const Complex& c = *m.complex;
  const int n = m.n;
  std::vector<std::vector<std::string>> ids(std::size_t(n + 1)), anchors(std::size_t(n + 1));
  std::vector<std::vector<std::vector<FaceEntry>>> faces(std::size_t(n + 1));
  for (int p = 0; p <= n; ++p) {
    const int q = n - p;
    for (std::size_t i = 0; i < c.count(q); ++i) {
      ids[p].push_back("*" + c.cell(q, int(i)).id);
      anchors[p].push_back("b(" + c.cell(q, int(i)).id + ")");
    }
    faces[p].resize(c.count(q));
  }
  // The dual of (q, i) has the duals of its cofaces (q+1, j) as faces.
  for (int q = 1; q <= n; ++q)
    for (std::size_t j = 0; j < c.count(q); ++j) {
      std::map<int, int> total;
      for (const auto& f : c.faces(q, int(j))) total[f.face] += f.coeff;
      for (const auto& [i, coeff] : total) {
        int s = sign[q][j].at(i);
        faces[n - q + 1][i].push_back({int(j), s * coeff});
      }
    }
  return std::make_shared<const Complex>(Complex::from_cw(std::move(ids), std::move(faces), std::move(anchors)));
}

}  // namespace

DualPairing dual_decomposition(const OrientedManifold& m) {
  if (!m.complex || m.n < 1 || m.complex->count(m.n) == 0)
    throw Error(ErrorCode::NotClosedManifold, "dual decomposition needs a closed manifold of dimension >= 1");
  const Complex& c = *m.complex;
  const int n = m.n;
  DualPairing d;
  d.primal = m;
  d.n = n;
  d.sign.assign(std::size_t(n + 1), {});
  for (int q = 0; q <= n; ++q) d.sign[q].assign(c.count(q), {});

  if (c.mode() == Mode::cw) {
    for (int q = 1; q <= n; ++q)
      for (std::size_t j = 0; j < c.count(q); ++j)
        for (const auto& f : c.faces(q, int(j))) d.sign[q][j][f.face] = 1;
    d.dual = assemble_dual(m, d.sign);
    return d;
  }

  d.geometric = true;
  auto ref = std::make_shared<Refinement>(barycentric_subdivision(m));
  d.refinement = ref;
  const SubdivisionMap& s = *ref->map;
  const Complex& fine = *s.fine;
  std::vector<int> offset(std::size_t(n + 2), 0);
  for (int q = 0; q <= n; ++q) offset[q + 1] = offset[q] + int(c.count(q));
  auto cell_of_vertex = [&](int w) {
    int q = 0;
    while (w >= offset[q + 1]) ++q;
    return CellRef{q, w - offset[q]};
  };

  // Orientation sign of each fine q-simplex inside its carrier, by index.
  std::vector<std::vector<int>> piece_sign(std::size_t(n + 1));
  for (int q = 0; q <= n; ++q) {
    piece_sign[q].assign(fine.count(q), 0);
    for (std::size_t i = 0; i < c.count(q); ++i)
      for (auto [f, o] : s.pieces({q, int(i)})) piece_sign[q][f] = o;
  }

  // Dual block of D: flags starting at D. Sign from the top simplex L u S,
  // where L is any flag ending at D: f'(L u S) * o_D(L).
  d.blocks.assign(std::size_t(n + 1), {});
  for (int q = 0; q <= n; ++q) d.blocks[q].assign(c.count(q), {});
  for (std::size_t t = 0; t < fine.count(n); ++t) {
    const auto& flag = fine.cell(n, int(t)).vertices;  // sorted: increasing cell dimension
    for (int q = 0; q <= n; ++q) {
      CellRef D = cell_of_vertex(flag[q]);
      std::vector<int> lower(flag.begin(), flag.begin() + q + 1), upper(flag.begin() + q, flag.end());
      CellRef L = *fine.find_simplex(lower);
      CellRef S = *fine.find_simplex(upper);
      int sgn = ref->manifold.fundamental[t] * piece_sign[q][L.index];
      auto& block = d.blocks[q][D.index];
      auto it = std::find_if(block.begin(), block.end(), [&](auto& e) { return e.first == S.index; });
      if (it == block.end()) {
        block.push_back({S.index, sgn});
      } else if (it->second != sgn) {
        throw Error(ErrorCode::NotClosedManifold, "dual block of '" + c.cell(D).id + "' has no consistent orientation");
      }
    }
  }
  for (auto& layer : d.blocks)
    for (auto& b : layer) std::sort(b.begin(), b.end());

  // Incidence of dual blocks: read eps* from the fine boundary of each block.
  auto block_boundary = [&](int q, int i) {
    std::map<int, long> acc;  // fine (n-q-1)-simplex -> coefficient
    const int p = n - q;
    for (auto [f, sg] : d.blocks[q][i])
      for (const auto& e : fine.faces(p, f)) acc[e.face] += long(sg) * e.coeff;
    return acc;
  };
  for (int q = 0; q < n; ++q)
    for (std::size_t i = 0; i < c.count(q); ++i) {
      auto acc = block_boundary(q, int(i));
      std::map<int, long> expected;
      for (const auto& co : c.cofaces(q, int(i))) {
        const int j = co.face;
        if (co.coeff == 0) continue;
        // any simplex of the coface block determines the ratio
        auto [f0, sg0] = d.blocks[q + 1][j].front();
        long coeff = acc.count(f0) ? acc[f0] * sg0 : 0;
        if (coeff == 0 || coeff % co.coeff != 0 || std::abs(coeff / co.coeff) != 1)
          throw Error(ErrorCode::NotClosedManifold, "dual block boundary of '" + c.cell(q, int(i)).id + "' is not a block sum");
        d.sign[q + 1][j][int(i)] = int(coeff / co.coeff);
        for (auto [f, sg] : d.blocks[q + 1][j]) expected[f] += coeff * sg;
      }
      for (auto& [f, v] : expected) acc[f] -= v;
      for (auto& [f, v] : acc)
        if (v != 0)
          throw Error(ErrorCode::NotClosedManifold, "dual block boundary of '" + c.cell(q, int(i)).id + "' does not close up");
    }
  d.dual = assemble_dual(m, d.sign);
  return d;
}

}  // namespace detline
