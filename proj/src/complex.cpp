#include "detline/complex.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "detline/errors.hpp"

namespace detline {

namespace {

// Parity of the permutation taking `from` to `to` (same elements).
int permutation_sign(const std::vector<int>& from, const std::vector<int>& to) {
  std::vector<int> pos(from.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    auto it = std::find(from.begin(), from.end(), to[i]);
    pos[i] = int(it - from.begin());
  }
  int sign = 1;
  std::vector<bool> seen(pos.size(), false);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = std::size_t(pos[j])) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

std::string simplex_id(const std::vector<int>& verts, const std::vector<std::string>& labels) {
  if (verts.size() == 1) return labels[verts[0]];
  std::string s = "[";
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (i) s += ",";
    s += labels[verts[i]];
  }
  return s + "]";
}

}  // namespace

std::vector<std::size_t> Complex::counts() const {
  std::vector<std::size_t> out;
  for (const auto& layer : cells_) out.push_back(layer.size());
  return out;
}

int Complex::incidence(CellRef cell, CellRef face) const {
  if (cell.dim != face.dim + 1 || cell.dim < 1) return 0;
  int total = 0;
  for (const auto& f : faces(cell.dim, cell.index))
    if (f.face == face.index) total += f.coeff;
  return total;
}

std::optional<CellRef> Complex::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<CellRef> Complex::find_simplex(std::vector<int> vertices) const {
  std::sort(vertices.begin(), vertices.end());
  auto it = by_vertices_.find(vertices);
  if (it == by_vertices_.end()) return std::nullopt;
  return it->second;
}

int Complex::anchor_vertex(CellRef c) const {
  const auto& v = cell(c).vertices;
  return *std::min_element(v.begin(), v.end());
}

bool Complex::is_face(CellRef small, CellRef big) const {
  if (small.dim > big.dim) return false;
  if (small == big) return true;
  if (mode_ == Mode::simplicial) {
    const auto& sv = cell(small).vertices;
    const auto& bv = cell(big).vertices;
    return std::all_of(sv.begin(), sv.end(),
                       [&](int v) { return std::find(bv.begin(), bv.end(), v) != bv.end(); });
  }
  for (const auto& f : faces(big.dim, big.index))
    if (is_face(small, CellRef{big.dim - 1, f.face})) return true;
  return false;
}

void Complex::finalize() {
  cofaces_.assign(cells_.size(), {});
  for (std::size_t q = 0; q < cells_.size(); ++q) cofaces_[q].assign(cells_[q].size(), {});
  for (std::size_t q = 1; q < cells_.size(); ++q)
    for (std::size_t i = 0; i < cells_[q].size(); ++i)
      for (const auto& f : faces_[q][i]) cofaces_[q - 1][f.face].push_back({int(i), f.coeff});
  by_id_.clear();
  by_vertices_.clear();
  for (std::size_t q = 0; q < cells_.size(); ++q)
    for (std::size_t i = 0; i < cells_[q].size(); ++i) {
      CellRef ref{int(q), int(i)};
      if (!by_id_.emplace(cells_[q][i].id, ref).second)
        throw Error(ErrorCode::InvalidIncidence, "duplicate cell id '" + cells_[q][i].id + "'");
      if (mode_ == Mode::simplicial) {
        auto key = cells_[q][i].vertices;
        std::sort(key.begin(), key.end());
        by_vertices_.emplace(std::move(key), ref);
      }
    }
  // Boundary squared must vanish.
  for (std::size_t q = 2; q < cells_.size(); ++q)
    for (std::size_t i = 0; i < cells_[q].size(); ++i) {
      std::map<int, long> acc;
      for (const auto& f : faces_[q][i])
        for (const auto& g : faces_[q - 1][f.face]) acc[g.face] += long(f.coeff) * g.coeff;
      for (const auto& [face, sum] : acc)
        if (sum != 0)
          throw Error(ErrorCode::InvalidIncidence, "boundary of boundary of '" + cells_[q][i].id +
                                                       "' is nonzero at '" + cells_[q - 2][face].id + "'");
    }
}

Complex Complex::from_simplices(std::size_t vertex_count, const std::vector<std::vector<int>>& simplices,
                                std::vector<std::string> vertex_labels) {
  if (vertex_labels.empty())
    for (std::size_t v = 0; v < vertex_count; ++v) vertex_labels.push_back("v" + std::to_string(v));
  std::set<std::vector<int>> all;
  for (auto s : simplices) {
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorCode::InvalidIncidence, "simplex with repeated vertex");
    const std::size_t k = s.size();
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> sub;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (1u << b)) sub.push_back(s[b]);
      all.insert(sub);
    }
  }
  Complex c;
  c.mode_ = Mode::simplicial;
  c.vertex_labels_ = vertex_labels;
  std::size_t top = 0;
  for (const auto& s : all) top = std::max(top, s.size());
  c.cells_.assign(top, {});
  // Vertices first in index order so that vertex v is 0-cell v when all are used.
  std::vector<std::vector<std::vector<int>>> by_dim(top);
  for (const auto& s : all) by_dim[s.size() - 1].push_back(s);
  std::sort(by_dim[0].begin(), by_dim[0].end());
  std::map<std::vector<int>, int> index;
  for (std::size_t q = 0; q < top; ++q)
    for (const auto& s : by_dim[q]) {
      index[s] = int(c.cells_[q].size());
      c.cells_[q].push_back(Cell{simplex_id(s, vertex_labels), int(q), s, vertex_labels[s.front()]});
    }
  c.faces_.assign(top, {});
  for (std::size_t q = 0; q < top; ++q) {
    c.faces_[q].assign(c.cells_[q].size(), {});
    if (q == 0) continue;
    for (std::size_t i = 0; i < c.cells_[q].size(); ++i) {
      const auto& v = c.cells_[q][i].vertices;
      for (std::size_t k = 0; k < v.size(); ++k) {
        std::vector<int> f = v;
        f.erase(f.begin() + long(k));
        c.faces_[q][i].push_back({index.at(f), (k % 2 == 0) ? 1 : -1});
      }
    }
  }
  c.finalize();
  return c;
}

Complex Complex::from_cw(std::vector<std::vector<std::string>> ids,
                         std::vector<std::vector<std::vector<FaceEntry>>> faces,
                         std::vector<std::vector<std::string>> anchors) {
  Complex c;
  c.mode_ = Mode::cw;
  c.cells_.resize(ids.size());
  for (std::size_t q = 0; q < ids.size(); ++q)
    for (std::size_t i = 0; i < ids[q].size(); ++i) {
      std::string anchor = q < anchors.size() && i < anchors[q].size() ? anchors[q][i] : "pt(" + ids[q][i] + ")";
      c.cells_[q].push_back(Cell{ids[q][i], int(q), {}, anchor});
    }
  c.faces_ = std::move(faces);
  c.faces_.resize(ids.size());
  for (std::size_t q = 0; q < ids.size(); ++q) c.faces_[q].resize(ids[q].size());
  c.finalize();
  return c;
}

Complex build_complex(const std::vector<RawCell>& raw, Mode mode) {
  std::set<std::string> ids;
  for (const auto& r : raw) {
    if (r.dim < 0) throw Error(ErrorCode::InvalidIncidence, "negative dimension for '" + r.id + "'");
    if (!ids.insert(r.id).second) throw Error(ErrorCode::InvalidIncidence, "duplicate cell id '" + r.id + "'");
  }
  if (mode == Mode::simplicial) {
    // Vertex order: order of appearance of the 0-cells.
    std::map<std::string, int> vindex;
    std::vector<std::string> labels;
    for (const auto& r : raw)
      if (r.dim == 0) {
        if (!r.vertices || r.vertices->size() != 1)
          throw Error(ErrorCode::InvalidIncidence, "0-simplex '" + r.id + "' needs exactly one vertex");
        vindex[r.vertices->front()] = int(labels.size());
        labels.push_back(r.vertices->front());
      }
    Complex c;
    c.mode_ = Mode::simplicial;
    c.vertex_labels_ = labels;
    int top = -1;
    for (const auto& r : raw) top = std::max(top, r.dim);
    c.cells_.assign(std::size_t(top + 1), {});
    std::map<std::vector<int>, CellRef> by_set;
    for (const auto& r : raw) {
      if (!r.vertices) throw Error(ErrorCode::InvalidIncidence, "simplex '" + r.id + "' lacks a vertex list");
      if (int(r.vertices->size()) != r.dim + 1)
        throw Error(ErrorCode::InvalidIncidence, "simplex '" + r.id + "' has wrong vertex count");
      std::vector<int> verts;
      for (const auto& label : *r.vertices) {
        auto it = vindex.find(label);
        if (it == vindex.end())
          throw Error(ErrorCode::DanglingFace, "vertex '" + label + "' of '" + r.id + "' is not listed");
        verts.push_back(it->second);
      }
      auto key = verts;
      std::sort(key.begin(), key.end());
      if (std::adjacent_find(key.begin(), key.end()) != key.end())
        throw Error(ErrorCode::InvalidIncidence, "simplex '" + r.id + "' repeats a vertex");
      if (!by_set.emplace(key, CellRef{r.dim, int(c.cells_[r.dim].size())}).second)
        throw Error(ErrorCode::InvalidIncidence, "simplex '" + r.id + "' listed twice");
      auto anchor = *std::min_element(verts.begin(), verts.end());
      c.cells_[r.dim].push_back(Cell{r.id, r.dim, verts, labels[anchor]});
    }
    c.faces_.assign(c.cells_.size(), {});
    for (std::size_t q = 0; q < c.cells_.size(); ++q) {
      c.faces_[q].assign(c.cells_[q].size(), {});
      if (q == 0) continue;
      for (std::size_t i = 0; i < c.cells_[q].size(); ++i) {
        const auto& v = c.cells_[q][i].vertices;
        for (std::size_t k = 0; k < v.size(); ++k) {
          std::vector<int> drop = v;
          drop.erase(drop.begin() + long(k));
          auto key = drop;
          std::sort(key.begin(), key.end());
          auto it = by_set.find(key);
          if (it == by_set.end())
            throw Error(ErrorCode::DanglingFace, "a face of '" + c.cells_[q][i].id + "' is not listed");
          const auto& face = c.cells_[q - 1][it->second.index];
          int sign = ((k % 2 == 0) ? 1 : -1) * permutation_sign(face.vertices, drop);
          c.faces_[q][i].push_back({it->second.index, sign});
        }
      }
    }
    c.finalize();
    // An explicit face table must match the alternating rule.
    for (const auto& r : raw) {
      if (r.faces.empty()) continue;
      CellRef self = *c.find(r.id);
      for (const auto& [fid, coeff] : r.faces) {
        auto f = c.find(fid);
        if (!f) throw Error(ErrorCode::DanglingFace, "face '" + fid + "' of '" + r.id + "' is not listed");
        if (c.incidence(self, *f) != coeff)
          throw Error(ErrorCode::InvalidIncidence, "face coefficient of '" + fid + "' in '" + r.id +
                                                       "' disagrees with the alternating rule");
      }
    }
    return c;
  }

  int top = -1;
  for (const auto& r : raw) top = std::max(top, r.dim);
  std::vector<std::vector<std::string>> layer_ids(std::size_t(top + 1));
  std::map<std::string, CellRef> where;
  for (const auto& r : raw) {
    where[r.id] = CellRef{r.dim, int(layer_ids[r.dim].size())};
    layer_ids[r.dim].push_back(r.id);
  }
  std::vector<std::vector<std::vector<FaceEntry>>> faces(std::size_t(top + 1));
  for (std::size_t q = 0; q < faces.size(); ++q) faces[q].resize(layer_ids[q].size());
  for (const auto& r : raw) {
    CellRef self = where[r.id];
    for (const auto& [fid, coeff] : r.faces) {
      auto it = where.find(fid);
      if (it == where.end()) throw Error(ErrorCode::DanglingFace, "face '" + fid + "' of '" + r.id + "' is not listed");
      if (it->second.dim != r.dim - 1)
        throw Error(ErrorCode::InvalidIncidence, "face '" + fid + "' of '" + r.id + "' has wrong dimension");
      faces[self.dim][self.index].push_back({it->second.index, coeff});
    }
  }
  return Complex::from_cw(std::move(layer_ids), std::move(faces));
}

long euler_characteristic(const Complex& c) {
  long chi = 0;
  for (int q = 0; q <= c.top_dim(); ++q) chi += (q % 2 == 0 ? 1 : -1) * long(c.count(q));
  return chi;
}

std::vector<std::vector<long>> integer_boundary(const Complex& c, int q) {
  std::vector<std::vector<long>> m(c.count(q - 1), std::vector<long>(c.count(q), 0));
  if (q < 1) return m;
  for (std::size_t i = 0; i < c.count(q); ++i)
    for (const auto& f : c.faces(q, int(i))) m[f.face][i] += f.coeff;
  return m;
}

OrientedManifold orient_closed_manifold(ComplexPtr c) {
  OrientedManifold m;
  m.complex = c;
  m.n = c->top_dim();
  const int n = m.n;
  if (n < 0) return m;
  const std::size_t tops = c->count(n);
  m.fundamental.assign(tops, 0);
  if (n == 0) {
    std::fill(m.fundamental.begin(), m.fundamental.end(), 1);
    return m;
  }
  // neighbours[t] = (other top cell, sign relation) through shared (n-1)-cells.
  std::vector<std::vector<std::pair<int, int>>> neighbours(tops);
  for (std::size_t f = 0; f < c->count(n - 1); ++f) {
    const auto& co = c->cofaces(n - 1, int(f));
    const auto& id = c->cell(n - 1, int(f)).id;
    if (co.size() == 2 && std::abs(co[0].coeff) == 1 && std::abs(co[1].coeff) == 1) {
      // f(A) e_A + f(B) e_B = 0  =>  f(B) = -f(A) e_A / e_B
      int rel = -co[0].coeff * co[1].coeff;
      neighbours[co[0].face].push_back({co[1].face, rel});
      neighbours[co[1].face].push_back({co[0].face, rel});
    } else if (c->mode() == Mode::cw && co.size() == 1 && co[0].coeff == 0) {
      // glued to the same top cell from both sides with opposite orientations
    } else if (c->mode() == Mode::cw && co.size() == 1 && std::abs(co[0].coeff) == 2) {
      throw Error(ErrorCode::NonOrientable, "(n-1)-cell '" + id + "' is glued with equal orientations");
    } else {
      throw Error(ErrorCode::NotPseudoManifold,
                  "(n-1)-cell '" + id + "' has " + std::to_string(co.size()) + " top-dimensional cofaces");
    }
  }
  for (std::size_t start = 0; start < tops; ++start) {
    if (m.fundamental[start] != 0) continue;
    m.fundamental[start] = 1;
    std::deque<int> queue{int(start)};
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      for (auto [u, rel] : neighbours[t]) {
        int want = rel * m.fundamental[t];
        if (m.fundamental[u] == 0) {
          m.fundamental[u] = want;
          queue.push_back(u);
        } else if (m.fundamental[u] != want) {
          throw Error(ErrorCode::NonOrientable, "orientation propagation is inconsistent at '" +
                                                    c->cell(n, u).id + "'");
        }
      }
    }
  }
  // The fundamental chain must be a cycle.
  for (std::size_t f = 0; f < c->count(n - 1); ++f) {
    long s = 0;
    for (const auto& e : c->cofaces(n - 1, int(f))) s += long(e.coeff) * m.fundamental[e.face];
    if (s != 0) throw Error(ErrorCode::NonOrientable, "fundamental chain is not a cycle");
  }
  return m;
}

}  // namespace detline
