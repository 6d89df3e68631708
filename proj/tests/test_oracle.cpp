#include "support.hpp"

#include "detline/families.hpp"
#include "detline/oracle.hpp"
#include "detline/pr_metric.hpp"

using namespace detline;
using testing::close_rel;
using testing::has_code;

namespace {

InnerProduct chain_ip(const std::vector<std::vector<Matrix<Cplx>>>& per_cell) {
  return InnerProduct(per_cell.begin(), per_cell.end());
}

}  // namespace

TEST_CASE("identity inner products: RS metric equals the T-metric", "[oracle]") {
  auto c = circle_complex(3);
  auto b = Bundle<double>::make(circle_system<double>(c, 3.0));
  auto ch = to_cplx(b->chains());
  auto r = rs_metric_finite(ch, to_cplx(b->homology()), identity_inner_product(ch));
  CHECK(close_rel(r.rs_metric, r.t_metric, 1e-10));
  CHECK(close_rel(r.rs_metric, 1.0 / std::abs(b->t_unit()), 1e-10));
  CHECK(r.zero_modes == std::vector<std::size_t>{0, 0});
}

TEST_CASE("random inner products: RS metric equals the T-metric", "[oracle]") {
  for (unsigned long long seed = 1; seed <= 6; ++seed) {
    auto c = seed % 2 ? sphere_complex(3) : torus_complex();
    auto b = Bundle<double>::make(random_gauge_trivial<double>(c, 2, seed));
    auto ip = chain_ip(random_inner_product(*c, 2, seed + 100));
    auto r = rs_metric_finite(to_cplx(b->chains()), to_cplx(b->homology()), ip);
    CHECK(close_rel(r.rs_metric, r.t_metric, 1e-8));
    CHECK(r.zero_modes == r.betti);
  }
}

TEST_CASE("finite RS metrics multiply to the canonical pairing", "[oracle][thm53]") {
  std::mt19937_64 rng(3);
  for (unsigned long long seed = 1; seed <= 4; ++seed) {
    auto c = seed % 2 ? sphere_complex(3) : circle_complex(4);
    auto e = random_regauge(random_gauge_trivial<double>(c, 2, seed), seed + 7);
    auto b = Bundle<double>::make(e), bs = Bundle<double>::make(e.dual());
    auto ip = random_inner_product(*c, 2, seed + 200);
    const double x = random_scalar<double>(rng), y = random_scalar<double>(rng);
    auto r = thm53_product_check(b, bs, ip, dual_inner_product(ip), x, y);
    CHECK(r.equal);
    // an unrelated form on the dual side breaks the identity
    auto bad = thm53_product_check(b, bs, ip, random_inner_product(*c, 2, seed + 300), x, y);
    CHECK_FALSE(bad.equal);
  }
}

TEST_CASE("inner products must be positive definite", "[oracle]") {
  auto c = circle_complex(3);
  auto b = Bundle<double>::make(circle_system<double>(c, 3.0));
  auto ch = to_cplx(b->chains());
  auto ip = identity_inner_product(ch);
  ip[1][2] = Matrix<Cplx>::from_rows({{Cplx(-1.0)}});
  CHECK_THROWS_MATCHES(rs_metric_finite(ch, to_cplx(b->homology()), ip), Error,
                       has_code(ErrorCode::NotPositiveDefinite));
  ip[1][2] = Matrix<Cplx>::from_rows({{Cplx(1.0, 0.5)}});
  CHECK_THROWS_MATCHES(rs_metric_finite(ch, to_cplx(b->homology()), ip), Error,
                       has_code(ErrorCode::NotPositiveDefinite));
  auto bs = Bundle<double>::make(b->system().dual());
  auto short_ip = random_inner_product(*c, 2, 1);
  CHECK_THROWS_MATCHES(thm53_product_check(b, bs, short_ip, short_ip, 1.0, 1.0), Error,
                       has_code(ErrorCode::DualMismatch));
}

TEST_CASE("closed forms", "[oracle]") {
  CHECK(close_rel(closed_form_circle(std::polar(1.0, M_PI / 3)), 1.0, 1e-14));
  CHECK(close_rel(closed_form_circle(Cplx(3.0)), 2.0, 1e-14));
  CHECK_THROWS_MATCHES(closed_form_circle(Cplx(1.0)), Error, has_code(ErrorCode::TrivialHolonomy));
  // L(2,1), zeta = -1: |-2| * |-2|
  CHECK(close_rel(closed_form_lens(2, 1, Cplx(-1.0)), 4.0, 1e-14));
  CHECK_THROWS_MATCHES(closed_form_lens(5, 1, Cplx(1.0)), Error, has_code(ErrorCode::NotAcyclic));
  CHECK_THROWS_MATCHES(closed_form_lens(6, 2, std::polar(1.0, M_PI / 3)), Error, has_code(ErrorCode::Usage));
  CHECK_THROWS_MATCHES(closed_form_lens(5, 1, std::polar(1.0, 0.3)), Error, has_code(ErrorCode::Usage));
}

TEST_CASE("lens closed form agrees with the sine product", "[oracle]") {
  // |zeta^k - 1| = 2 |sin(pi k j / p)| for zeta = exp(2 pi i j / p); r q = 1 mod p
  struct L {
    int p, q, r;
  };
  for (auto [p, q, r] : {L{5, 1, 1}, L{7, 2, 4}, L{7, 3, 5}, L{11, 4, 3}})
    for (int j = 1; j < p; ++j) {
      const double expect = 2 * std::abs(std::sin(M_PI * j / p)) * 2 * std::abs(std::sin(M_PI * j * r / p));
      CHECK(close_rel(closed_form_lens(p, q, std::polar(1.0, 2 * M_PI * j / p)), expect, 1e-12));
    }
}

TEST_CASE("circle norm matches the closed form", "[oracle][pr]") {
  auto c = circle_complex(5);
  auto p = std::make_shared<const DualPairing>(dual_decomposition(orient_closed_manifold(c)));
  for (double theta : {M_PI / 3, M_PI / 2, 2 * M_PI / 3}) {
    const Cplx lambda = std::polar(1.0, theta);
    auto dd = make_duality(p, circle_system<Cplx>(c, lambda));
    CHECK(close_rel(pr_norm(dd, Cplx(1)), closed_form_circle(lambda), 1e-8));
    // conjugate holonomy gives the same norm
    auto dc = make_duality(p, circle_system<Cplx>(c, std::conj(lambda)));
    CHECK(close_rel(pr_norm(dc, Cplx(1)), pr_norm(dd, Cplx(1)), 1e-12));
  }
}
