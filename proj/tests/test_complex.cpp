#include <catch_amalgamated.hpp>

#include "detline/families.hpp"
#include "detline/subdivision.hpp"

using namespace detline;

namespace {

ComplexPtr make(const std::vector<std::vector<int>>& simplices, std::size_t vertices) {
  return std::make_shared<const Complex>(Complex::from_simplices(vertices, simplices));
}

std::vector<std::vector<long>> multiply(const std::vector<std::vector<long>>& a, const std::vector<std::vector<long>>& b) {
  std::size_t rows = a.size(), inner = b.size(), cols = b.empty() ? 0 : b[0].size();
  std::vector<std::vector<long>> c(rows, std::vector<long>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k)
      for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

bool all_zero(const std::vector<std::vector<long>>& m) {
  for (const auto& row : m)
    for (long x : row)
      if (x != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("standard complexes have the expected cell counts", "[complex]") {
  auto c = circle_complex(3);
  CHECK(c->counts() == std::vector<std::size_t>{3, 3});
  CHECK(euler_characteristic(*c) == 0);
  auto s = sphere_complex(3);
  CHECK(s->counts() == std::vector<std::size_t>{5, 10, 10, 5});
  CHECK(euler_characteristic(*s) == 0);
  auto t = torus_complex();
  CHECK(t->counts() == std::vector<std::size_t>{7, 21, 14});
  CHECK(euler_characteristic(*t) == 0);
}

TEST_CASE("lens CW table squares to zero", "[complex]") {
  auto c = lens_complex(5);
  CHECK(c->mode() == Mode::cw);
  for (int q = 2; q <= 3; ++q) CHECK(all_zero(multiply(integer_boundary(*c, q - 1), integer_boundary(*c, q))));
  CHECK(integer_boundary(*c, 2)[0][0] == 5);
}

TEST_CASE("boundary squared vanishes on simplicial input", "[complex]") {
  for (auto c : {sphere_complex(3), torus_complex(), circle_complex(6)})
    for (int q = 2; q <= c->top_dim(); ++q) CHECK(all_zero(multiply(integer_boundary(*c, q - 1), integer_boundary(*c, q))));
}

TEST_CASE("build_complex rejects broken input", "[complex]") {
  std::vector<RawCell> dangling{{"a", 0, std::vector<std::string>{"a"}, {}},
                                {"e", 1, std::vector<std::string>{"a", "b"}, {}}};
  CHECK_THROWS_MATCHES(build_complex(dangling, Mode::simplicial), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::DanglingFace; }));
  std::vector<RawCell> cw{{"v", 0, std::nullopt, {}},
                          {"e", 1, std::nullopt, {{"v", 1}}},
                          {"f", 2, std::nullopt, {{"e", 1}}}};
  CHECK_THROWS_MATCHES(build_complex(cw, Mode::cw), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::InvalidIncidence; }));
  std::vector<RawCell> missing{{"v", 0, std::nullopt, {}}, {"e", 1, std::nullopt, {{"w", 0}}}};
  CHECK_THROWS_MATCHES(build_complex(missing, Mode::cw), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::DanglingFace; }));
}

TEST_CASE("orientation by sign propagation", "[complex]") {
  auto m = orient_closed_manifold(circle_complex(3));
  CHECK(m.n == 1);
  CHECK(m.fundamental.front() == 1);
  // the fundamental chain is a cycle
  auto d = integer_boundary(*m.complex, 1);
  for (const auto& row : d) {
    long s = 0;
    for (std::size_t t = 0; t < row.size(); ++t) s += row[t] * m.fundamental[t];
    CHECK(s == 0);
  }
  auto s3 = orient_closed_manifold(sphere_complex(3));
  auto d3 = integer_boundary(*s3.complex, 3);
  for (const auto& row : d3) {
    long s = 0;
    for (std::size_t t = 0; t < row.size(); ++t) s += row[t] * s3.fundamental[t];
    CHECK(s == 0);
  }
  // two disjoint circles: each component starts with +1
  auto two = make({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, 6);
  auto m2 = orient_closed_manifold(two);
  CHECK(m2.fundamental[0] == 1);
  CHECK(std::count(m2.fundamental.begin(), m2.fundamental.end(), 0) == 0);
}

TEST_CASE("non-manifolds and non-orientable surfaces are rejected", "[complex]") {
  auto disk = make({{0, 1, 2}}, 3);
  CHECK_THROWS_MATCHES(orient_closed_manifold(disk), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NotPseudoManifold; }));
  // six-vertex projective plane
  auto rp2 = make({{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1}, {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}}, 6);
  CHECK(euler_characteristic(*rp2) == 1);
  CHECK_THROWS_MATCHES(orient_closed_manifold(rp2), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NonOrientable; }));
}

TEST_CASE("barycentric subdivision counts and carriers", "[complex][subdivision]") {
  auto c3 = barycentric_subdivision(orient_closed_manifold(circle_complex(3)));
  CHECK(c3.manifold.complex->counts() == std::vector<std::size_t>{6, 6});

  auto tet = sphere_complex(2);
  auto s = barycentric_subdivision(tet);
  CHECK(euler_characteristic(*s->fine) == 2);

  auto tri = barycentric_subdivision(make({{0, 1, 2}}, 3));
  CHECK(tri->fine->count(2) == 6);
  CHECK(tri->fine->count(0) == 7);

  // carrier dimension bounds the cell dimension; carriers respect faces
  const auto& fine = *s->fine;
  for (int q = 0; q <= fine.top_dim(); ++q)
    for (std::size_t i = 0; i < fine.count(q); ++i) {
      CellRef car = s->carrier_of({q, int(i)});
      CHECK(car.dim >= q);
      for (const auto& f : fine.faces(q, int(i))) CHECK(tet->is_face(s->carrier_of({q - 1, f.face}), car));
    }
  // every coarse top cell is cut into (n+1)! pieces
  for (std::size_t t = 0; t < tet->count(2); ++t) CHECK(s->pieces({2, int(t)}).size() == 6);
}

TEST_CASE("edge split and subdivision of CW input", "[complex][subdivision]") {
  auto c = circle_complex(3);
  auto s = split_edge(c, 0);
  CHECK(s->fine->counts() == std::vector<std::size_t>{4, 4});
  CHECK(s->pieces({1, 0}).size() == 2);
  CHECK_THROWS_MATCHES(barycentric_subdivision(lens_complex(3)), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::ModeMismatch; }));
}

TEST_CASE("dual decomposition pairs dimensions and transposes incidence", "[complex][dual]") {
  for (auto c : {circle_complex(4), sphere_complex(2), sphere_complex(3), torus_complex()}) {
    auto m = orient_closed_manifold(c);
    auto d = dual_decomposition(m);
    const int n = m.n;
    CHECK(d.geometric);
    for (int q = 0; q <= n; ++q) CHECK(d.dual->count(n - q) == c->count(q));
    for (int q = 1; q <= n; ++q)
      for (std::size_t i = 0; i < c->count(q); ++i)
        for (const auto& f : c->faces(q, int(i))) {
          int star = d.dual->incidence(d.dual_of({q - 1, f.face}), d.dual_of({q, int(i)}));
          CHECK(std::abs(star) == std::abs(f.coeff));
          CHECK(star == d.pair_sign({q, int(i)}, {q - 1, f.face}) * f.coeff);
        }
    for (int q = 2; q <= n; ++q) CHECK(all_zero(multiply(integer_boundary(*d.dual, q - 1), integer_boundary(*d.dual, q))));
    CHECK(euler_characteristic(*d.dual) == euler_characteristic(*c) * (n % 2 == 0 ? 1 : -1) * (n % 2 == 0 ? 1 : -1));
  }
  auto lens = dual_decomposition(orient_closed_manifold(lens_complex(5)));
  CHECK_FALSE(lens.geometric);
  CHECK(lens.dual->count(0) == 1);
}
