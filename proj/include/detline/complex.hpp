#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace detline {

enum class Mode { simplicial, cw };

struct CellRef {
  int dim = 0;
  int index = 0;
  auto operator<=>(const CellRef&) const = default;
};

struct Cell {
  std::string id;
  int dim = 0;
  std::vector<int> vertices;  // simplicial: global vertex indices in orientation order
  std::string anchor;         // point at which sections are evaluated
};

struct FaceEntry {
  int face = 0;   // index among cells of dimension dim-1 (faces) or dim+1 (cofaces)
  int coeff = 0;  // incidence number
};

// Input record for build_complex. In simplicial mode faces are derived from
// the vertex list; an explicit face table, when given, must agree with it.
struct RawCell {
  std::string id;
  int dim = 0;
  std::optional<std::vector<std::string>> vertices;
  std::vector<std::pair<std::string, int>> faces;
};

class Complex {
 public:
  Mode mode() const { return mode_; }
  int top_dim() const { return int(cells_.size()) - 1; }
  std::size_t count(int q) const { return q >= 0 && q < int(cells_.size()) ? cells_[q].size() : 0; }
  std::vector<std::size_t> counts() const;

  const Cell& cell(int q, int i) const { return cells_.at(q).at(i); }
  const Cell& cell(CellRef c) const { return cell(c.dim, c.index); }
  const std::vector<FaceEntry>& faces(int q, int i) const { return faces_.at(q).at(i); }
  const std::vector<FaceEntry>& cofaces(int q, int i) const { return cofaces_.at(q).at(i); }
  // 0 when `face` is not a codimension-one face of `cell`.
  int incidence(CellRef cell, CellRef face) const;

  std::optional<CellRef> find(const std::string& id) const;

  // Simplicial mode only.
  std::size_t vertex_count() const { return vertex_labels_.size(); }
  const std::string& vertex_label(int v) const { return vertex_labels_.at(v); }
  std::optional<CellRef> find_simplex(std::vector<int> vertices) const;
  int anchor_vertex(CellRef c) const;

  // Face relation of any codimension (reflexive).
  bool is_face(CellRef small, CellRef big) const;

  // Builds a closed simplicial complex from simplices given as vertex lists;
  // every face of a listed simplex is added. Vertex lists are sorted, so the
  // orientation of each simplex is its increasing vertex order.
  static Complex from_simplices(std::size_t vertex_count, const std::vector<std::vector<int>>& simplices,
                                std::vector<std::string> vertex_labels = {});

  static Complex from_cw(std::vector<std::vector<std::string>> ids,
                         std::vector<std::vector<std::vector<FaceEntry>>> faces,
                         std::vector<std::vector<std::string>> anchors = {});

  friend Complex build_complex(const std::vector<RawCell>& raw, Mode mode);

 private:
  void finalize();

  Mode mode_ = Mode::simplicial;
  std::vector<std::vector<Cell>> cells_;
  std::vector<std::vector<std::vector<FaceEntry>>> faces_;
  std::vector<std::vector<std::vector<FaceEntry>>> cofaces_;
  std::map<std::string, CellRef> by_id_;
  std::map<std::vector<int>, CellRef> by_vertices_;  // sorted vertex set -> cell
  std::vector<std::string> vertex_labels_;
};

using ComplexPtr = std::shared_ptr<const Complex>;

// Validates ids, faces and the boundary-squared identity.
// Errors: DanglingFace, InvalidIncidence.
Complex build_complex(const std::vector<RawCell>& raw, Mode mode);

long euler_characteristic(const Complex& c);

struct OrientedManifold {
  ComplexPtr complex;
  int n = 0;
  std::vector<int> fundamental;  // sign per top cell
};

// Sign propagation across (n-1)-cells; the first top cell of every connected
// component gets +1. Errors: NotPseudoManifold, NonOrientable.
OrientedManifold orient_closed_manifold(ComplexPtr c);

// Integer boundary matrix of degree q (rows: (q-1)-cells, cols: q-cells).
std::vector<std::vector<long>> integer_boundary(const Complex& c, int q);

}  // namespace detline
