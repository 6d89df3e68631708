#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "detline/complex.hpp"

namespace detline {

// A simplicial subdivision tau' of tau. Fine vertices carry integer
// barycentric weights over coarse vertices; carriers are the smallest coarse
// simplices containing each fine simplex.
struct SubdivisionMap {
  ComplexPtr coarse;
  ComplexPtr fine;
  std::vector<std::vector<std::pair<int, long>>> position;  // per fine vertex: (coarse vertex, weight)
  std::vector<std::vector<CellRef>> carrier;                // [q][i] for fine cells

  CellRef carrier_of(CellRef fine_cell) const { return carrier.at(fine_cell.dim).at(fine_cell.index); }
  // Orientation of a fine q-simplex inside a q-dimensional carrier: sign of the
  // determinant of barycentric weights. 0 when the carrier has higher dimension.
  int orientation(CellRef fine_cell) const;
  // Fine q-simplices lying in the coarse q-cell, with their orientation signs.
  std::vector<std::pair<int, int>> pieces(CellRef coarse_cell) const;

  std::vector<std::vector<std::vector<std::pair<int, int>>>> pieces_;  // [q][coarse i] -> (fine i, sign)
};

struct Refinement {
  OrientedManifold manifold;
  std::shared_ptr<const SubdivisionMap> map;
};

// First derived subdivision: one fine vertex b(D) per coarse cell D, fine
// simplices are flags. Fine vertices are ordered by (dimension, index) of
// their coarse cell, so the anchor of a flag simplex is its smallest cell.
// Errors: ModeMismatch.
std::shared_ptr<const SubdivisionMap> barycentric_subdivision(ComplexPtr c);
Refinement barycentric_subdivision(const OrientedManifold& m);

// Stellar subdivision at the midpoint of one edge; every simplex containing
// the edge is cut in two. The new vertex is last in the vertex order.
std::shared_ptr<const SubdivisionMap> split_edge(ComplexPtr c, int edge);
Refinement split_edge(const OrientedManifold& m, int edge);

// Transports the fundamental cycle of `m` to a subdivision.
OrientedManifold transport_orientation(const OrientedManifold& m, const SubdivisionMap& s);

// Dual cell decomposition tau*. The dual of primal cell (q, i) is cell
// (n - q, i) of `dual`; its faces are the duals of the cofaces of (q, i).
// Simplicial input yields geometric dual blocks inside the barycentric
// refinement and incidence read off from them; CW input yields the abstract
// transpose (no refinement).
struct DualPairing {
  OrientedManifold primal;
  ComplexPtr dual;
  int n = 0;
  bool geometric = false;
  std::shared_ptr<const Refinement> refinement;
  // blocks[q][i]: the dual of primal (q, i) as a chain of fine (n-q)-simplices (index, sign).
  std::vector<std::vector<std::vector<std::pair<int, int>>>> blocks;
  // sign[q][i]: for primal (q, i) and each face j, eps*[(q-1,j)*, (q,i)*] / eps[(q,i), (q-1,j)].
  std::vector<std::vector<std::map<int, int>>> sign;

  CellRef dual_of(CellRef primal_cell) const { return {n - primal_cell.dim, primal_cell.index}; }
  CellRef primal_of(CellRef dual_cell) const { return {n - dual_cell.dim, dual_cell.index}; }
  // Evaluation point shared by D and D*: the barycenter of the primal cell.
  std::string common_point(CellRef primal_cell) const;
  int pair_sign(CellRef coface, CellRef face) const;
};

// Errors: NotClosedManifold (n < 1 or empty input), plus validation errors of
// the dual incidence when the dual blocks fail to form a chain complex.
DualPairing dual_decomposition(const OrientedManifold& m);

}  // namespace detline
