#include "detline/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <random>

namespace detline {

namespace {

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const Matrix<Cplx>& m) {
  EMat x(Eigen::Index(m.rows()), Eigen::Index(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) x(Eigen::Index(i), Eigen::Index(j)) = m(i, j);
  return x;
}

Matrix<Cplx> from_eigen(const EMat& x) {
  Matrix<Cplx> m(std::size_t(x.rows()), std::size_t(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) m(std::size_t(i), std::size_t(j)) = x(i, j);
  return m;
}

// Lower Cholesky factor L of the whole degree, H = L L^*.
EMat degree_factor(const std::vector<Matrix<Cplx>>& blocks, std::size_t size) {
  EMat l = EMat::Zero(Eigen::Index(size), Eigen::Index(size));
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    EMat h = to_eigen(b);
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw Error(ErrorCode::NotPositiveDefinite, "inner product block is not Hermitian");
    Eigen::LLT<EMat> llt(h);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::NotPositiveDefinite, "inner product block is not positive definite");
    EMat f = llt.matrixL();
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      if (std::abs(f(i, i)) < 1e-12 * std::sqrt(scale))
        throw Error(ErrorCode::NotPositiveDefinite, "inner product block is numerically singular");
    l.block(at, at, h.rows(), h.cols()) = f;
    at += h.rows();
  }
  if (std::size_t(at) != size) throw Error(ErrorCode::DualMismatch, "inner product does not cover the chain group");
  return l;
}

}  // namespace

InnerProduct identity_inner_product(const ChainComplex<Cplx>& c) {
  InnerProduct ip;
  for (const auto& layer : c.blocks) {
    std::vector<Matrix<Cplx>> v;
    for (auto b : layer) v.push_back(Matrix<Cplx>::identity(b));
    ip.push_back(std::move(v));
  }
  return ip;
}

InnerProduct cochain_inner_product(const std::vector<std::vector<Matrix<Cplx>>>& per_cell) {
  // degree -q for q = top..0, lo = -top
  return InnerProduct(per_cell.rbegin(), per_cell.rend());
}

std::vector<std::vector<Matrix<Cplx>>> dual_inner_product(const std::vector<std::vector<Matrix<Cplx>>>& per_cell) {
  auto out = per_cell;
  for (auto& layer : out)
    for (auto& m : layer) m = from_eigen(to_eigen(m).inverse().conjugate());
  return out;
}

std::vector<std::vector<Matrix<Cplx>>> random_inner_product(const Complex& k, std::size_t rank, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<Matrix<Cplx>>> out(std::size_t(k.top_dim() + 1));
  for (int q = 0; q <= k.top_dim(); ++q)
    for (std::size_t i = 0; i < k.count(q); ++i) {
      const auto n = static_cast<Eigen::Index>(rank);
      EMat a(n, n);
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = Cplx(u(rng), u(rng));
      EMat h = a * a.adjoint() + 0.5 * EMat::Identity(a.rows(), a.cols());
      out[q].push_back(from_eigen(h));
    }
  return out;
}

SpectralReport rs_metric_finite(const ChainComplex<Cplx>& c, const HomologyBasis<Cplx>& h, const InnerProduct& ip) {
  if (ip.size() != c.blocks.size()) throw Error(ErrorCode::DualMismatch, "inner product has the wrong number of degrees");
  const int lo = c.lo, hi = c.hi();
  std::vector<EMat> l, dt;  // factors and orthonormal boundaries, [q - lo]
  for (int q = lo; q <= hi; ++q) l.push_back(degree_factor(ip[q - lo], c.size(q)));
  // coordinates y = L^* x; the boundary becomes L_{q-1}^* d_q L_q^{-*}
  for (int q = lo; q <= hi; ++q) {
    EMat d = to_eigen(c.boundary(q));
    if (q == lo || d.size() == 0) {
      dt.push_back(EMat::Zero(Eigen::Index(c.size(q - 1)), Eigen::Index(c.size(q))));
      continue;
    }
    EMat right = l[q - lo].adjoint().triangularView<Eigen::Upper>().solve(EMat::Identity(d.cols(), d.cols()));
    dt.push_back(l[q - 1 - lo].adjoint() * d * right);
  }

  SpectralReport r;
  r.lo = lo;
  ChainComplex<Cplx> on;
  on.lo = lo;
  on.blocks = c.blocks;
  for (const auto& d : dt) on.d.push_back(from_eigen(d));
  HomologyBasis<Cplx> hon = boundary_data(on);

  double log_rs = 0.0, log_harm = 0.0;
  for (int q = lo; q <= hi; ++q) {
    const Eigen::Index n = Eigen::Index(c.size(q));
    EMat lap = EMat::Zero(n, n);
    if (q + 1 <= hi) lap += dt[q + 1 - lo] * dt[q + 1 - lo].adjoint();
    lap += dt[q - lo].adjoint() * dt[q - lo];
    std::vector<double> ev;
    EMat vecs;
    if (n > 0) {
      Eigen::SelfAdjointEigenSolver<EMat> es(lap);
      for (Eigen::Index i = 0; i < n; ++i) ev.push_back(std::max(0.0, es.eigenvalues()(i)));
      vecs = es.eigenvectors();
    }
    double top = ev.empty() ? 0.0 : ev.back();
    double cut = 1e-8 * std::max(1.0, top);
    std::size_t zeros = 0;
    double log_det = 0.0;
    for (double x : ev) {
      if (x <= cut)
        ++zeros;
      else
        log_det += std::log(x);
    }
    const std::size_t betti = h.betti(q);
    if (zeros != betti)
      throw Error(ErrorCode::IllConditioned, "Laplacian kernel in degree " + std::to_string(q) + " has dimension " +
                                                 std::to_string(zeros) + ", expected " + std::to_string(betti));
    // harmonic parts of the basis cycles (orthogonal projection onto ker)
    EMat zt = l[q - lo].adjoint() * to_eigen(h.z[q - lo]);
    double vol = 1.0;
    if (betti > 0) {
      EMat coeffs = vecs.leftCols(Eigen::Index(betti)).adjoint() * zt;
      vol = std::abs(coeffs.determinant());
    }
    hon.z.push_back(from_eigen(zt));
    r.eigenvalues.push_back(ev);
    r.det_prime.push_back(std::exp(log_det));
    r.zero_modes.push_back(zeros);
    r.betti.push_back(betti);
    r.harmonic_volume.push_back(vol);
    const int sign = parity_sign(q);
    log_harm += sign * std::log(vol);
    // det' exponent (-1)^{q+1} q / 2
    log_rs += -sign * 0.5 * q * log_det;
  }
  r.harmonic_metric = std::exp(log_harm);
  r.rs_metric = std::exp(log_harm + log_rs);
  r.t_metric = 1.0 / std::abs(t_coordinate(on, unit_frame(on), hon));
  return r;
}

double closed_form_circle(Cplx lambda) {
  if (std::abs(lambda - Cplx(1.0)) < 1e-14) throw Error(ErrorCode::TrivialHolonomy, "holonomy 1 leaves homology");
  if (lambda == Cplx(0.0)) throw Error(ErrorCode::Singular, "holonomy must be invertible");
  // one vertex, one edge: d_1 = lambda - 1
  return std::abs(lambda - Cplx(1.0));
}

double closed_form_lens(int p, int q, Cplx zeta) {
  if (p < 2) throw Error(ErrorCode::Usage, "lens spaces need p >= 2");
  if (std::gcd(p, q) != 1) throw Error(ErrorCode::Usage, "p and q must be coprime");
  Cplx zp(1.0);
  for (int i = 0; i < p; ++i) zp *= zeta;
  if (std::abs(zp - Cplx(1.0)) > 1e-9) throw Error(ErrorCode::Usage, "character is not a p-th root of unity");
  if (std::abs(zeta - Cplx(1.0)) < 1e-12) throw Error(ErrorCode::NotAcyclic, "trivial character");
  int r = 1;
  while ((long(r) * q - 1) % p != 0) ++r;
  Cplx zr(1.0);
  for (int i = 0; i < r; ++i) zr *= zeta;
  // d_1 = zeta - 1, d_2 = sum of zeta^j = 0, d_3 = zeta^r - 1
  return std::abs(zeta - Cplx(1.0)) * std::abs(zr - Cplx(1.0));
}

}  // namespace detline
