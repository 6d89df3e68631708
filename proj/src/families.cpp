#include "detline/families.hpp"

#include <numeric>

namespace detline {

ComplexPtr circle_complex(int n) {
  if (n < 3) throw Error(ErrorCode::Usage, "a simplicial circle needs at least 3 vertices");
  std::vector<std::vector<int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  edges.push_back({0, n - 1});
  return std::make_shared<const Complex>(Complex::from_simplices(std::size_t(n), edges));
}

ComplexPtr sphere_complex(int d) {
  if (d < 1) throw Error(ErrorCode::Usage, "sphere dimension must be at least 1");
  std::vector<std::vector<int>> facets;
  for (int skip = 0; skip <= d + 1; ++skip) {
    std::vector<int> f;
    for (int v = 0; v <= d + 1; ++v)
      if (v != skip) f.push_back(v);
    facets.push_back(f);
  }
  return std::make_shared<const Complex>(Complex::from_simplices(std::size_t(d + 2), facets));
}

ComplexPtr lens_complex(int p) {
  if (p < 2) throw Error(ErrorCode::Usage, "lens spaces need p >= 2");
  std::vector<std::vector<std::string>> ids{{"e0"}, {"e1"}, {"e2"}, {"e3"}};
  std::vector<std::vector<std::vector<FaceEntry>>> faces(4);
  faces[0] = {{}};
  faces[1] = {{{0, 0}}};
  faces[2] = {{{0, p}}};
  faces[3] = {{{0, 0}}};
  return std::make_shared<const Complex>(Complex::from_cw(std::move(ids), std::move(faces)));
}

ComplexPtr torus_complex() {
  std::vector<std::vector<int>> tris;
  for (int i = 0; i < 7; ++i) {
    tris.push_back({i, (i + 1) % 7, (i + 3) % 7});
    tris.push_back({i, (i + 2) % 7, (i + 3) % 7});
  }
  return std::make_shared<const Complex>(Complex::from_simplices(7, tris));
}

int lens_inverse(int p, int q) {
  if (std::gcd(p, q) != 1) throw Error(ErrorCode::Usage, "p and q must be coprime");
  const int qm = ((q % p) + p) % p;
  for (int r = 1; r < p; ++r)
    if ((r * qm) % p == 1) return r;
  return 1;  // p = 1
}

std::pair<int, int> torus_step(int a, int b) {
  switch (((b - a) % 7 + 7) % 7) {
    case 1: return {1, 0};
    case 3: return {0, 1};
    case 2: return {-1, 1};
    case 6: return {-1, 0};
    case 4: return {0, -1};
    case 5: return {1, -1};
  }
  throw Error(ErrorCode::InvalidIncidence, "torus vertices coincide");
}

}  // namespace detline
