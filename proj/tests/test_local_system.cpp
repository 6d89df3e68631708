#include <catch_amalgamated.hpp>

#include "detline/chain.hpp"
#include "detline/families.hpp"

using namespace detline;

namespace {

auto has_code(ErrorCode c) {
  return Catch::Matchers::Predicate<Error>([c](const Error& e) { return e.code() == c; });
}

Matrix<double> m2(double a, double b, double c, double d) { return Matrix<double>::from_rows({{a, b}, {c, d}}); }

}  // namespace

TEST_CASE("non-flat transports are rejected", "[local_system]") {
  auto s2 = sphere_complex(2);
  std::vector<Matrix<double>> edges(s2->count(1), Matrix<double>::identity(2));
  edges[0] = m2(1, 1, 0, 1);
  CHECK_THROWS_MATCHES(LocalSystem<double>::from_edges(s2, 2, edges), Error, has_code(ErrorCode::NotFlat));
  edges[0] = m2(1, 2, 2, 4);
  CHECK_THROWS_MATCHES(LocalSystem<double>::from_edges(s2, 2, edges), Error, has_code(ErrorCode::Singular));
}

TEST_CASE("restrictions compose along faces", "[local_system]") {
  auto s3 = sphere_complex(3);
  auto e = random_regauge(random_gauge_trivial<double>(s3, 2, 4), 5);
  const Complex& c = *s3;
  for (std::size_t t = 0; t < c.count(2); ++t) {
    CellRef tri{2, int(t)};
    for (const auto& f : c.faces(2, int(t))) {
      CellRef edge{1, f.face};
      for (const auto& g : c.faces(1, f.face)) {
        CellRef v{0, g.face};
        auto direct = e.restriction(v, tri);
        auto composed = e.restriction(v, edge) * e.restriction(edge, tri);
        CHECK(relative_difference(direct, composed) < 1e-12);
      }
    }
  }
}

TEST_CASE("dual and determinant systems", "[local_system]") {
  auto c = circle_complex(3);
  auto lambda = m2(2, 1, 0, 3);
  auto e = circle_system<double>(c, lambda);
  auto d = e.dual();
  auto closing = *c->find_simplex({0, 2});
  auto hi = *c->find_simplex({2});
  auto ed = d.restriction(hi, closing);
  // inverse transpose of [[2,1],[0,3]] is [[1/2,0],[-1/6,1/3]]
  CHECK(std::abs(ed(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(ed(1, 0) + 1.0 / 6.0) < 1e-15);
  CHECK(std::abs(ed(0, 1)) < 1e-15);
  auto det = e.det();
  CHECK(det.rank() == 1);
  CHECK(std::abs(det.restriction(hi, closing)(0, 0) - 6.0) < 1e-14);
  auto sum = e.direct_sum(LocalSystem<double>::trivial(c, 1));
  CHECK(sum.rank() == 3);
}

TEST_CASE("CW attaching terms must sum to the incidence numbers", "[local_system]") {
  auto c = lens_complex(3);
  using Table = LocalSystem<double>::TermTable;
  auto one = Matrix<double>::identity(1);
  Table t(4);
  for (auto& layer : t) layer.resize(1);
  t[1][0] = {{0, -1, one}, {0, 1, one}};
  t[2][0] = {{0, 1, one}, {0, 1, one}};  // sums to 2, incidence is 3
  t[3][0] = {{0, -1, one}, {0, 1, one}};
  CHECK_THROWS_MATCHES(LocalSystem<double>::from_terms(c, 1, t), Error, has_code(ErrorCode::InvalidIncidence));
}

TEST_CASE("twisted boundary squares to zero for random systems", "[local_system]") {
  for (unsigned long long seed = 1; seed <= 5; ++seed) {
    auto e = random_regauge(random_gauge_trivial<double>(sphere_complex(3), 3, seed), seed + 100);
    auto c = twisted_chain_complex(e);
    for (int q = 2; q <= 3; ++q) CHECK((c.boundary(q - 1) * c.boundary(q)).max_abs() < 1e-10);
  }
  auto lens = lens_system<Cplx>(lens_complex(7), 7, 2, std::polar(1.0, 2 * M_PI / 7));
  auto cl = twisted_chain_complex(lens);
  CHECK((cl.boundary(2) * cl.boundary(3)).max_abs() < 1e-12);
}

TEST_CASE("systems transported to a subdivision stay flat", "[local_system][subdivision]") {
  auto s3 = sphere_complex(3);
  auto e = random_gauge_trivial<double>(s3, 2, 8);
  auto sd = barycentric_subdivision(s3);
  auto ef = e.on_subdivision(*sd);
  auto i = subdivision_chain_map(e, *sd);
  CHECK_NOTHROW(check_chain_map(twisted_chain_complex(e), twisted_chain_complex(ef), i));
}
