#pragma once

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "detline/errors.hpp"
#include "detline/kernels.hpp"
#include "detline/numeric_config.hpp"
#include "detline/scalar.hpp"

namespace detline {

// Dense row-major matrix over one of the backend scalars.
template <class S>
class Matrix {
 public:
  using Scalar = S;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<S>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw Error(ErrorCode::ParseError, "ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  S* row(std::size_t i) { return data_.data() + i * cols_; }
  const S* row(std::size_t i) const { return data_.data() + i * cols_; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(row(a), row(a) + cols_, row(b));
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  void add_block(std::size_t r0, std::size_t c0, const Matrix& b, const S& factor) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) += factor * b(i, j);
  }

  Matrix columns(const std::vector<std::size_t>& idx) const {
    Matrix c(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < idx.size(); ++k) c(i, k) = (*this)(i, idx[k]);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix adjoint() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = ScalarTraits<S>::conj((*this)(i, j));
    return t;
  }

  RealOf<S> max_abs() const {
    RealOf<S> m(0);
    for (const auto& x : data_) {
      auto a = abs_of(x);
      if (a > m) m = a;
    }
    return m;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const S& x) { return x == S(0); });
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (aik == S(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix sum shape mismatch");
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix difference shape mismatch");
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }

  friend Matrix operator*(const S& s, Matrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

template <class S>
Matrix<S> hcat(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat row mismatch");
  Matrix<S> c(a.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(0, a.cols(), b);
  return c;
}

template <class S>
Matrix<S> block_diag(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> c(a.rows() + b.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(a.rows(), a.cols(), b);
  return c;
}

// Relative residual max|a-b| / max(1, max|a|, max|b|).
template <class S>
double relative_difference(const Matrix<S>& a, const Matrix<S>& b) {
  double scale = std::max({1.0, ScalarTraits<S>::to_double(a.max_abs()), ScalarTraits<S>::to_double(b.max_abs())});
  return ScalarTraits<S>::to_double((a - b).max_abs()) / scale;
}

namespace detail {

template <class S>
inline void row_sub(S* y, const S& a, const S* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] -= a * x[i];
}
inline void row_sub(double* y, const double& a, const double* x, std::size_t n) { kernels::sub_scaled(y, a, x, n); }
inline void row_sub(Cplx* y, const Cplx& a, const Cplx* x, std::size_t n) { kernels::sub_scaled(y, a, x, n); }

// Decides whether a pivot candidate is zero. Exact backends compare with 0;
// float backends use a threshold relative to the matrix scale and refuse to
// decide inside the ambiguity band.
template <class S>
class PivotRule {
 public:
  using Real = RealOf<S>;

  explicit PivotRule(const Real& scale) {
    if constexpr (!ScalarTraits<S>::exact) {
      const auto& tol = tolerance();
      Real s = scale > Real(0) ? scale : Real(1);
      threshold_ = Real(tol.rank) * s;
      low_ = Real(tol.ill_low) * s;
      high_ = Real(tol.ill_high) * s;
    }
  }

  bool is_zero(const S& x) const {
    if constexpr (ScalarTraits<S>::exact) {
      return x == S(0);
    } else {
      Real m = abs_of(x);
      if (m > low_ && m < high_) {
        std::ostringstream os;
        os << "pivot magnitude " << ScalarTraits<S>::to_double(m) << " inside rank-decision band";
        throw Error(ErrorCode::IllConditioned, os.str());
      }
      return m <= threshold_;
    }
  }

  // Row choice within a column: first nonzero (exact) or largest magnitude (float).
  std::size_t choose(const Matrix<S>& a, std::size_t col, std::size_t from) const {
    std::size_t best = from;
    if constexpr (ScalarTraits<S>::exact) {
      for (std::size_t i = from; i < a.rows(); ++i)
        if (a(i, col) != S(0)) return i;
      return from;
    } else {
      Real bm = abs_of(a(from, col));
      for (std::size_t i = from + 1; i < a.rows(); ++i) {
        Real m = abs_of(a(i, col));
        if (m > bm) {
          bm = m;
          best = i;
        }
      }
      return best;
    }
  }

 private:
  Real threshold_{0}, low_{0}, high_{0};
};

}  // namespace detail

template <class S>
struct RowReduction {
  Matrix<S> reduced;                  // reduced row echelon form
  std::vector<std::size_t> pivots;    // pivot column of each leading row
};

// Gauss-Jordan elimination. Pivots are searched only in the first
// `pivot_limit` columns; the scale for zero decisions comes from those columns.
template <class S>
RowReduction<S> row_reduce(Matrix<S> a, std::size_t pivot_limit) {
  pivot_limit = std::min(pivot_limit, a.cols());
  RealOf<S> scale(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < pivot_limit; ++j) {
      auto m = abs_of(a(i, j));
      if (m > scale) scale = m;
    }
  detail::PivotRule<S> rule(scale);
  RowReduction<S> out;
  std::size_t r = 0;
  const std::size_t n = a.cols();
  for (std::size_t c = 0; c < pivot_limit && r < a.rows(); ++c) {
    std::size_t p = rule.choose(a, c, r);
    if (rule.is_zero(a(p, c))) continue;
    a.swap_rows(p, r);
    const S inv = S(1) / a(r, c);
    for (std::size_t j = c; j < n; ++j) a(r, j) *= inv;
    a(r, c) = S(1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r) continue;
      const S f = a(i, c);
      if (f == S(0)) continue;
      detail::row_sub(a.row(i) + c, f, a.row(r) + c, n - c);
      a(i, c) = S(0);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(a);
  return out;
}

template <class S>
RowReduction<S> row_reduce(const Matrix<S>& a) {
  return row_reduce(a, a.cols());
}

template <class S>
std::size_t rank(const Matrix<S>& a) {
  return row_reduce(a).pivots.size();
}

// Leftmost maximal set of linearly independent columns.
template <class S>
std::vector<std::size_t> independent_columns(const Matrix<S>& a) {
  return row_reduce(a).pivots;
}

// Determinant by partial-pivot elimination (no rank threshold).
template <class S>
S determinant(Matrix<S> a) {
  if (!a.square()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = a.rows();
  S det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    if constexpr (ScalarTraits<S>::exact) {
      while (p < n && a(p, c) == S(0)) ++p;
      if (p == n) return S(0);
    } else {
      auto best = abs_of(a(c, c));
      for (std::size_t i = c + 1; i < n; ++i) {
        auto m = abs_of(a(i, c));
        if (m > best) {
          best = m;
          p = i;
        }
      }
      if (a(p, c) == S(0)) return S(0);
    }
    if (p != c) {
      a.swap_rows(p, c);
      det = -det;
    }
    det *= a(c, c);
    const S inv = S(1) / a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      const S f = a(i, c) * inv;
      if (f == S(0)) continue;
      detail::row_sub(a.row(i) + c, f, a.row(c) + c, n - c);
    }
  }
  return det;
}

// Columns spanning the kernel, one per free column of the RREF.
template <class S>
Matrix<S> nullspace(const Matrix<S>& a) {
  const std::size_t n = a.cols();
  if (a.rows() == 0) return Matrix<S>::identity(n);
  auto rr = row_reduce(a);
  std::vector<bool> is_pivot(n, false);
  for (auto p : rr.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < n; ++j)
    if (!is_pivot[j]) free.push_back(j);
  Matrix<S> k(n, free.size());
  for (std::size_t f = 0; f < free.size(); ++f) {
    k(free[f], f) = S(1);
    for (std::size_t r = 0; r < rr.pivots.size(); ++r) k(rr.pivots[r], f) = -rr.reduced(r, free[f]);
  }
  return k;
}

// X with B X = V for B of full column rank. Throws BadHomologyBasis-style
// errors through `on_fail` when V leaves the span.
template <class S>
Matrix<S> solve_in_span(const Matrix<S>& b, const Matrix<S>& v, ErrorCode on_fail = ErrorCode::Singular) {
  if (b.rows() != v.rows()) throw std::invalid_argument("solve_in_span row mismatch");
  const std::size_t k = b.cols();
  auto rr = row_reduce(hcat(b, v), k);
  if (rr.pivots.size() != k) throw Error(on_fail, "spanning set is rank deficient");
  Matrix<S> x(k, v.cols());
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < v.cols(); ++j) x(r, j) = rr.reduced(r, k + j);
  // Remaining rows must vanish: V is in the span.
  RealOf<S> scale = std::max(b.max_abs(), v.max_abs());
  RealOf<S> limit(0);
  if constexpr (!ScalarTraits<S>::exact) limit = RealOf<S>(tolerance().flat) * (scale > RealOf<S>(1) ? scale : RealOf<S>(1));
  for (std::size_t r = k; r < rr.reduced.rows(); ++r)
    for (std::size_t j = 0; j < v.cols(); ++j)
      if (abs_of(rr.reduced(r, k + j)) > limit) throw Error(on_fail, "vector outside the spanned subspace");
  return x;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& a) {
  if (!a.square()) throw std::invalid_argument("inverse of non-square matrix");
  auto rr = row_reduce(hcat(a, Matrix<S>::identity(a.rows())), a.cols());
  if (rr.pivots.size() != a.rows()) throw Error(ErrorCode::Singular, "matrix is not invertible");
  return rr.reduced.block(0, a.cols(), a.rows(), a.rows());
}

template <class S>
Matrix<S> inverse_transpose(const Matrix<S>& a) {
  return inverse(a).transpose();
}

}  // namespace detline
