#pragma once

#include <json.hpp>

#include <string>

#include "detline/local_system.hpp"

namespace detline {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);
// Writes to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

ComplexPtr complex_from_json(const Json& j);
Json complex_to_json(const Complex& c);

// Real field "R" or complex field "C" as declared by a system file.
bool system_is_complex(const Json& j);

// Shortest decimal that reads back to the same double (input files).
std::string format_roundtrip(double x);

template <class S>
S scalar_from_json(const Json& v) {
  if (v.is_array()) {
    if (v.size() != 2) throw Error(ErrorCode::ParseError, "complex entries are [re, im] pairs");
    auto part = [](const Json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    return ScalarTraits<S>::from_parts(part(v[0]), part(v[1]));
  }
  if (v.is_string()) return ScalarTraits<S>::from_parts(v.get<std::string>(), "");
  if (v.is_number()) return ScalarTraits<S>::from_parts(v.dump(), "");
  throw Error(ErrorCode::ParseError, "matrix entry must be a string, a number or a pair");
}

template <class S>
Json scalar_to_json(const S& x) {
  if constexpr (ScalarTraits<S>::exact) {
    return x.str();
  } else if constexpr (ScalarTraits<S>::is_complex) {
    Cplx z = ScalarTraits<S>::to_complex(x);
    return Json::array({format_roundtrip(z.real()), format_roundtrip(z.imag())});
  } else {
    return format_roundtrip(ScalarTraits<S>::to_double(x));
  }
}

template <class S>
std::string format_real(const RealOf<S>& x) {
  return ScalarTraits<S>::format(x);
}

template <class S>
Matrix<S> matrix_from_json(const Json& j, std::size_t rank) {
  if (!j.is_array() || j.size() != rank) throw Error(ErrorCode::ParseError, "matrix must have " + std::to_string(rank) + " rows");
  Matrix<S> m(rank, rank);
  for (std::size_t i = 0; i < rank; ++i) {
    if (!j[i].is_array() || j[i].size() != rank) throw Error(ErrorCode::ParseError, "matrix rows must have rank entries");
    for (std::size_t k = 0; k < rank; ++k) m(i, k) = scalar_from_json<S>(j[i][k]);
  }
  return m;
}

template <class S>
Json matrix_to_json(const Matrix<S>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

// Simplicial complexes: transports are restrictions (face, cell); edge
// generators are read from (higher vertex, edge) entries and every other
// listed pair is verified. CW complexes: attaching terms (face, cell, coeff);
// unlisted pairs are the identity with the incidence number.
template <class S>
LocalSystem<S> system_from_json(const Json& j, ComplexPtr c) {
  try {
    const std::size_t rank = j.at("rank").get<std::size_t>();
    if (rank == 0) throw Error(ErrorCode::ParseError, "rank must be positive");
    const Json empty = Json::array();
    const Json& list = j.contains("transports") ? j.at("transports") : empty;
    auto ref = [&](const Json& id) {
      auto r = c->find(id.get<std::string>());
      if (!r) throw Error(ErrorCode::DanglingFace, "unknown cell '" + id.get<std::string>() + "' in transports");
      return *r;
    };
    if (c->mode() == Mode::simplicial) {
      std::vector<std::pair<std::pair<CellRef, CellRef>, Matrix<S>>> table;
      for (const auto& t : list) table.push_back({{ref(t.at("face")), ref(t.at("cell"))}, matrix_from_json<S>(t.at("matrix"), rank)});
      return LocalSystem<S>::from_restrictions(c, rank, table);
    }
    typename LocalSystem<S>::TermTable terms(std::size_t(c->top_dim() + 1));
    for (int q = 0; q <= c->top_dim(); ++q) terms[q].resize(c->count(q));
    for (const auto& t : list) {
      CellRef face = ref(t.at("face")), cell = ref(t.at("cell"));
      if (face.dim != cell.dim - 1)
        throw Error(ErrorCode::InvalidIncidence, "transport between cells of non-adjacent dimensions");
      int coeff = t.contains("coeff") ? t.at("coeff").get<int>() : c->incidence(cell, face);
      terms[cell.dim][cell.index].push_back({face.index, coeff, matrix_from_json<S>(t.at("matrix"), rank)});
    }
    for (int q = 1; q <= c->top_dim(); ++q)
      for (std::size_t i = 0; i < c->count(q); ++i)
        for (const auto& f : c->faces(q, int(i))) {
          bool listed = false;
          for (const auto& t : terms[q][i]) listed = listed || t.face == f.face;
          if (!listed) terms[q][i].push_back({f.face, f.coeff, Matrix<S>::identity(rank)});
        }
    return LocalSystem<S>::from_terms(c, rank, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

// Simplicial systems are written in anchor gauge (edge transports only), which
// is the same bundle up to the per-cell gauge change.
template <class S>
Json system_to_json(const LocalSystem<S>& e) {
  const Complex& c = *e.complex();
  Json j;
  j["rank"] = e.rank();
  j["field"] = ScalarTraits<S>::is_complex ? "C" : "R";
  j["backend"] = ScalarTraits<S>::backend;
  Json list = Json::array();
  if (c.mode() == Mode::simplicial) {
    for (std::size_t k = 0; k < c.count(1); ++k) {
      const auto& v = c.cell(1, int(k)).vertices;
      CellRef hi = *c.find_simplex({std::max(v[0], v[1])});
      Json t;
      t["face"] = c.cell(hi).id;
      t["cell"] = c.cell(1, int(k)).id;
      t["matrix"] = matrix_to_json(e.edges()[k]);
      list.push_back(t);
    }
  } else {
    for (int q = 1; q <= c.top_dim(); ++q)
      for (std::size_t i = 0; i < c.count(q); ++i)
        for (const auto& term : e.terms(q, int(i))) {
          Json t;
          t["face"] = c.cell(q - 1, term.face).id;
          t["cell"] = c.cell(q, int(i)).id;
          t["coeff"] = term.coeff;
          t["matrix"] = matrix_to_json(term.map);
          list.push_back(t);
        }
  }
  j["transports"] = list;
  return j;
}

}  // namespace detline
