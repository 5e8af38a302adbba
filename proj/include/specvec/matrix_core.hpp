#pragma once

// Complex dense matrices and the structural operations used by the
// singular-vector identities: row/column deletion, principal-submatrix
// deletion, conjugate transpose and Gram products.
//
// Indexing convention: all C++ entry points are 0-based (Eigen style).
// The CLI and JSON reports are 1-based.

#include <cmath>
#include <complex>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace specvec {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a matrix entry is NaN or infinite.
class NonFiniteError : public std::invalid_argument {
 public:
  NonFiniteError(Index row, Index col)
      : std::invalid_argument("non-finite matrix entry at (" + std::to_string(row + 1) + ", " +
                              std::to_string(col + 1) + ")"),
        row_(row),
        col_(col) {}
  Index row() const noexcept { return row_; }
  Index col() const noexcept { return col_; }

 private:
  Index row_;
  Index col_;
};

/// Raised when a matrix handed to HermitianMatrix is not Hermitian within tolerance.
class NotHermitianError : public std::invalid_argument {
 public:
  explicit NotHermitianError(double asymmetry)
      : std::invalid_argument(message(asymmetry)), asymmetry_(asymmetry) {}
  /// Frobenius norm of M - M^H.
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  static std::string message(double asymmetry) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix is not Hermitian: ||M - M^H||_F = " << asymmetry;
    return os.str();
  }
  double asymmetry_;
};

namespace detail {

template <typename Real>
void require_finite(const ComplexMatrix<Real>& m) {
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) {
      const auto& z = m(r, c);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NonFiniteError(r, c);
    }
}

inline void require_index(Index idx, Index bound, const char* what) {
  if (idx < 0 || idx >= bound)
    throw std::out_of_range(std::string(what) + " index " + std::to_string(idx) +
                            " out of range [0, " + std::to_string(bound) + ")");
}

}  // namespace detail

/// An m x n complex matrix with finite entries. Zero-row and zero-column
/// matrices are legal: they arise when deleting the only row or column.
template <typename Real>
class DenseMatrix {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Storage = ComplexMatrix<Real>;

  DenseMatrix() = default;

  DenseMatrix(Index rows, Index cols) : data_(Storage::Zero(rows, cols)) {}

  explicit DenseMatrix(Storage data) : data_(std::move(data)) { detail::require_finite(data_); }

  /// Row-major nested initializer, e.g. DenseMatrix<double>::from_rows({{2, 0}, {0, 1}}).
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<Scalar>> rows) {
    const Index m = static_cast<Index>(rows.size());
    const Index n = m == 0 ? 0 : static_cast<Index>(rows.begin()->size());
    Storage s(m, n);
    Index r = 0;
    for (const auto& row : rows) {
      if (static_cast<Index>(row.size()) != n)
        throw std::invalid_argument("from_rows: ragged row " + std::to_string(r + 1));
      Index c = 0;
      for (const auto& v : row) s(r, c++) = v;
      ++r;
    }
    return DenseMatrix(std::move(s));
  }

  static DenseMatrix identity(Index n) { return DenseMatrix(Storage::Identity(n, n)); }

  static DenseMatrix diagonal(std::initializer_list<Real> diag) {
    const Index n = static_cast<Index>(diag.size());
    Storage s = Storage::Zero(n, n);
    Index i = 0;
    for (Real d : diag) {
      s(i, i) = d;
      ++i;
    }
    return DenseMatrix(std::move(s));
  }

  Index rows() const noexcept { return data_.rows(); }
  Index cols() const noexcept { return data_.cols(); }
  bool empty() const noexcept { return data_.size() == 0; }
  Scalar operator()(Index r, Index c) const { return data_(r, c); }
  const Storage& matrix() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a.data_ == b.data_;
  }

 private:
  Storage data_;
};

/// A Hermitian matrix stored in exactly Hermitian form.
///
/// The constructor accepts entries whose asymmetry is within
/// 1e-13 * max|m_ij| (entrywise) and then symmetrizes via (M + M^H) / 2, so
/// diagonal entries are exactly real afterwards.
template <typename Real>
class HermitianMatrix {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Storage = ComplexMatrix<Real>;

  static constexpr double kAsymmetryTolerance = 1e-13;

  HermitianMatrix() = default;

  explicit HermitianMatrix(const Storage& m) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("HermitianMatrix requires a square matrix, got " +
                                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    detail::require_finite(m);
    const Real maxabs = m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
    const Storage skew = m - m.adjoint();
    const Real worst = skew.size() == 0 ? Real(0) : skew.cwiseAbs().maxCoeff();
    if (worst > Real(kAsymmetryTolerance) * maxabs)
      throw NotHermitianError(static_cast<double>(skew.norm()));
    data_ = symmetrized(m);
  }

  static HermitianMatrix from_rows(std::initializer_list<std::initializer_list<Scalar>> rows) {
    return HermitianMatrix(DenseMatrix<Real>::from_rows(rows).matrix());
  }

  Index dim() const noexcept { return data_.rows(); }
  Scalar operator()(Index r, Index c) const { return data_(r, c); }
  const Storage& matrix() const noexcept { return data_; }

 private:
  struct Trusted {};
  HermitianMatrix(Storage m, Trusted) : data_(std::move(m)) {}

  static Storage symmetrized(const Storage& m) {
    const Index n = m.rows();
    Storage s(n, n);
    for (Index c = 0; c < n; ++c) {
      s(c, c) = Scalar(m(c, c).real(), Real(0));
      for (Index r = c + 1; r < n; ++r) {
        const Scalar v = (m(r, c) + std::conj(m(c, r))) / Real(2);
        s(r, c) = v;
        s(c, r) = std::conj(v);
      }
    }
    return s;
  }

  template <typename R>
  friend HermitianMatrix<R> delete_row_col(const HermitianMatrix<R>&, Index);
  template <typename R>
  friend HermitianMatrix<R> gram_right(const DenseMatrix<R>&);
  template <typename R>
  friend HermitianMatrix<R> gram_left(const DenseMatrix<R>&);

  Storage data_;
};

template <typename Real>
Real frobenius_norm(const DenseMatrix<Real>& a) {
  return a.matrix().norm();
}

template <typename Real>
DenseMatrix<Real> conjugate_transpose(const DenseMatrix<Real>& a) {
  return DenseMatrix<Real>(a.matrix().adjoint().eval());
}

/// A with row j removed. Deleting the only row yields a 0 x n matrix.
template <typename Real>
DenseMatrix<Real> delete_row(const DenseMatrix<Real>& a, Index j) {
  detail::require_index(j, a.rows(), "row");
  const Index m = a.rows();
  typename DenseMatrix<Real>::Storage out(m - 1, a.cols());
  out.topRows(j) = a.matrix().topRows(j);
  out.bottomRows(m - 1 - j) = a.matrix().bottomRows(m - 1 - j);
  return DenseMatrix<Real>(std::move(out));
}

/// A with column s removed. Deleting the only column yields an m x 0 matrix.
template <typename Real>
DenseMatrix<Real> delete_col(const DenseMatrix<Real>& a, Index s) {
  detail::require_index(s, a.cols(), "column");
  const Index n = a.cols();
  typename DenseMatrix<Real>::Storage out(a.rows(), n - 1);
  out.leftCols(s) = a.matrix().leftCols(s);
  out.rightCols(n - 1 - s) = a.matrix().rightCols(n - 1 - s);
  return DenseMatrix<Real>(std::move(out));
}

/// Principal submatrix with row j and column j removed.
template <typename Real>
HermitianMatrix<Real> delete_row_col(const HermitianMatrix<Real>& m, Index j) {
  if (m.dim() < 2) throw std::invalid_argument("delete_row_col requires dim >= 2");
  detail::require_index(j, m.dim(), "row/column");
  const Index n = m.dim();
  const auto& s = m.matrix();
  typename HermitianMatrix<Real>::Storage out(n - 1, n - 1);
  for (Index c = 0, oc = 0; c < n; ++c) {
    if (c == j) continue;
    for (Index r = 0, orow = 0; r < n; ++r) {
      if (r == j) continue;
      out(orow++, oc) = s(r, c);
    }
    ++oc;
  }
  return HermitianMatrix<Real>(std::move(out), typename HermitianMatrix<Real>::Trusted{});
}

/// A A^H. Entry (p, q) is the inner product of rows p and q, so the Gram
/// matrix of a row-deleted A is exactly the principal submatrix of this one.
template <typename Real>
HermitianMatrix<Real> gram_right(const DenseMatrix<Real>& a) {
  if (a.empty()) throw std::invalid_argument("gram_right of an empty matrix");
  const auto& x = a.matrix();
  const Index m = x.rows();
  typename HermitianMatrix<Real>::Storage g(m, m);
  for (Index p = 0; p < m; ++p) {
    g(p, p) = std::complex<Real>(x.row(p).squaredNorm(), Real(0));
    for (Index q = p + 1; q < m; ++q) {
      // sum_k x(p,k) conj(x(q,k)); Eigen's dot conjugates its left operand.
      const std::complex<Real> v = x.row(q).dot(x.row(p));
      g(p, q) = v;
      g(q, p) = std::conj(v);
    }
  }
  return HermitianMatrix<Real>(std::move(g), typename HermitianMatrix<Real>::Trusted{});
}

/// A^H A, entry (p, q) = b_p^H b_q for columns b.
template <typename Real>
HermitianMatrix<Real> gram_left(const DenseMatrix<Real>& a) {
  if (a.empty()) throw std::invalid_argument("gram_left of an empty matrix");
  const auto& x = a.matrix();
  const Index n = x.cols();
  typename HermitianMatrix<Real>::Storage g(n, n);
  for (Index p = 0; p < n; ++p) {
    g(p, p) = std::complex<Real>(x.col(p).squaredNorm(), Real(0));
    for (Index q = p + 1; q < n; ++q) {
      const std::complex<Real> v = x.col(p).dot(x.col(q));
      g(p, q) = v;
      g(q, p) = std::conj(v);
    }
  }
  return HermitianMatrix<Real>(std::move(g), typename HermitianMatrix<Real>::Trusted{});
}

using DenseMatrixd = DenseMatrix<double>;
using HermitianMatrixd = HermitianMatrix<double>;

}  // namespace specvec
