#pragma once

// Dense Jacobi kernels: cyclic Jacobi for Hermitian eigenproblems and
// one-sided (Hestenes) Jacobi for the complex SVD.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "specvec/matrix_core.hpp"

namespace specvec {

struct SpectralTolerances {
  /// Relative off-diagonal stop: Hermitian sweeps stop once
  /// off(M) <= off_diag_stop * ||M||_F; one-sided SVD sweeps stop once every
  /// column pair is orthogonal to that relative level.
  double off_diag_stop = 1e-14;
  int max_sweeps = 60;

  void validate() const {
    if (!(off_diag_stop > 0.0) || !std::isfinite(off_diag_stop))
      throw std::invalid_argument("off_diag_stop must be positive and finite");
    if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  }
};

/// Raised when a Jacobi iteration fails to converge within max_sweeps.
class SpectralError : public std::runtime_error {
 public:
  SpectralError(const std::string& what, double residual)
      : std::runtime_error(format(what, residual)), residual_(residual) {}
  /// Relative off-diagonal measure at the point the iteration gave up.
  double residual() const noexcept { return residual_; }

 private:
  static std::string format(const std::string& what, double residual) {
    std::ostringstream os;
    os.precision(6);
    os << what << " did not converge (residual off-diagonal " << residual << ")";
    return os.str();
  }
  double residual_;
};

template <typename Real>
struct EigenDecomposition {
  RealVector<Real> eigenvalues;    // descending
  ComplexMatrix<Real> vectors;     // column i pairs with eigenvalues(i)
  int sweeps = 0;
};

/// Singular values with both unitary factors.
///
/// Stored convention: A = left * diag(singular_values) * right^H, the
/// i-th column of `left` being the i-th left singular vector. The
/// factorization A = U^H Sigma V used in the identity literature maps as
/// U = left^H, V = right^H, hence |u_ij| = |left(j, i)| and
/// |v_ls| = |right(s, l)|.
template <typename Real>
struct SVDResult {
  static constexpr const char* kConvention =
      "A = L * diag(sigma) * R^H; column i of L (resp. R) is the i-th left (resp. right) "
      "singular vector; |u_ij|^2 = |L(j,i)|^2, |v_ls|^2 = |R(s,l)|^2";

  RealVector<Real> singular_values;  // descending, length min(m, n)
  ComplexMatrix<Real> left;          // m x m
  ComplexMatrix<Real> right;         // n x n
  int sweeps = 0;
};

namespace detail {

/// Stable descending order; ties keep original position.
template <typename Real>
std::vector<Index> descending_order(const RealVector<Real>& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) > values(b); });
  return order;
}

/// Rotate each column so its largest-magnitude entry (first one on ties) is real and >= 0.
template <typename Real>
void normalize_phases(ComplexMatrix<Real>& v) {
  for (Index c = 0; c < v.cols(); ++c) {
    Index best = 0;
    Real best_abs = Real(-1);
    for (Index r = 0; r < v.rows(); ++r) {
      const Real a = std::abs(v(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs <= Real(0)) continue;
    const std::complex<Real> phase = std::conj(v(best, c)) / best_abs;
    v.col(c) *= phase;
    v(best, c) = std::complex<Real>(best_abs, Real(0));
  }
}

/// Plane rotation diagonalizing the 2x2 Hermitian block [[app, g], [conj(g), aqq]].
/// The unitary Q acts on the (p, q) plane as
///   Q = [[c, s], [-conj(e) s, conj(e) c]],   e = g / |g|,
/// so that Q^H [[app, g], [conj g, aqq]] Q is diagonal.
template <typename Real>
struct PlaneRotation {
  Real c;
  Real s;
  std::complex<Real> e_conj;  // conj(g / |g|)
  Real t;                     // tan of the rotation angle

  static PlaneRotation make(Real app, Real aqq, std::complex<Real> g) {
    const Real mag = std::abs(g);
    const Real tau = (aqq - app) / (Real(2) * mag);
    const Real t = (tau >= Real(0) ? Real(1) : Real(-1)) / (std::abs(tau) + std::hypot(Real(1), tau));
    const Real c = Real(1) / std::hypot(Real(1), t);
    return PlaneRotation{c, t * c, std::conj(g / mag), t};
  }

  /// X <- X Q on columns p, q.
  void apply_right(ComplexMatrix<Real>& x, Index p, Index q) const {
    for (Index k = 0; k < x.rows(); ++k) {
      const std::complex<Real> xp = x(k, p);
      const std::complex<Real> xq = e_conj * x(k, q);
      x(k, p) = c * xp - s * xq;
      x(k, q) = s * xp + c * xq;
    }
  }

  /// X <- Q^H X on rows p, q.
  void apply_left_adjoint(ComplexMatrix<Real>& x, Index p, Index q) const {
    const std::complex<Real> e = std::conj(e_conj);
    for (Index k = 0; k < x.cols(); ++k) {
      const std::complex<Real> xp = x(p, k);
      const std::complex<Real> xq = e * x(q, k);
      x(p, k) = c * xp - s * xq;
      x(q, k) = s * xp + c * xq;
    }
  }
};

template <typename Real>
Real off_diagonal_norm(const ComplexMatrix<Real>& a) {
  Real sum = 0;
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      if (r != c) sum += std::norm(a(r, c));
  return std::sqrt(sum);
}

/// Extend the orthonormal columns [0, keep) of `basis` to a full unitary
/// matrix. Each new column is the standard basis vector with the largest
/// component outside the current span (first on ties), orthogonalized with
/// two passes of Gram-Schmidt. The residuals' squared norms sum to the
/// missing dimension, so the chosen one has norm >= 1/sqrt(n).
template <typename Real>
void complete_unitary(ComplexMatrix<Real>& basis, Index keep) {
  const Index n = basis.rows();
  auto residual = [&](Index e, Index filled) {
    ComplexVector<Real> v = ComplexVector<Real>::Zero(n);
    v(e) = Real(1);
    for (int pass = 0; pass < 2; ++pass)
      for (Index k = 0; k < filled; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    return v;
  };
  for (Index filled = keep; filled < n; ++filled) {
    Index best = 0;
    Real best_norm = Real(-1);
    for (Index e = 0; e < n; ++e) {
      const Real nv = residual(e, filled).norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = e;
      }
    }
    basis.col(filled) = residual(best, filled) / best_norm;
  }
}

/// One-sided Jacobi on a tall (rows >= cols) matrix. Returns column norms
/// (unsorted) with g orthogonalized in place and v accumulating rotations.
template <typename Real>
int one_sided_jacobi(ComplexMatrix<Real>& g, ComplexMatrix<Real>* v, const SpectralTolerances& tol) {
  const Index n = g.cols();
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real threshold =
      std::max(static_cast<Real>(tol.off_diag_stop), static_cast<Real>(g.rows()) * eps);
  for (int sweep = 1; sweep <= tol.max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Real alpha = g.col(p).squaredNorm();
        const Real beta = g.col(q).squaredNorm();
        if (alpha == Real(0) || beta == Real(0)) continue;
        const std::complex<Real> gamma = g.col(p).dot(g.col(q));
        if (std::abs(gamma) <= threshold * std::sqrt(alpha) * std::sqrt(beta)) continue;
        const auto rot = PlaneRotation<Real>::make(alpha, beta, gamma);
        rot.apply_right(g, p, q);
        if (v) rot.apply_right(*v, p, q);
        rotated = true;
      }
    }
    if (!rotated) return sweep;
  }
  Real worst = 0;
  for (Index p = 0; p + 1 < n; ++p)
    for (Index q = p + 1; q < n; ++q) {
      const Real alpha = g.col(p).norm(), beta = g.col(q).norm();
      if (alpha > 0 && beta > 0) worst = std::max(worst, std::abs(g.col(p).dot(g.col(q))) / (alpha * beta));
    }
  throw SpectralError("one-sided Jacobi SVD", static_cast<double>(worst));
}

template <typename Real>
SVDResult<Real> svd_tall(const ComplexMatrix<Real>& a, const SpectralTolerances& tol, bool vectors) {
  const Index m = a.rows();
  const Index n = a.cols();
  ComplexMatrix<Real> g = a;
  ComplexMatrix<Real> v = ComplexMatrix<Real>::Identity(n, n);
  SVDResult<Real> out;
  out.sweeps = one_sided_jacobi(g, vectors ? &v : nullptr, tol);

  RealVector<Real> norms(n);
  for (Index k = 0; k < n; ++k) norms(k) = g.col(k).norm();
  const auto order = descending_order(norms);
  out.singular_values.resize(n);
  for (Index k = 0; k < n; ++k) out.singular_values(k) = norms(order[static_cast<std::size_t>(k)]);
  if (!vectors) return out;

  out.right.resize(n, n);
  for (Index k = 0; k < n; ++k) out.right.col(k) = v.col(order[static_cast<std::size_t>(k)]);

  // Columns with negligible norm carry no reliable direction; they are
  // replaced by a unitary completion along with the m - n extra columns.
  const Real sigma_max = n > 0 ? out.singular_values(0) : Real(0);
  const Real cutoff = static_cast<Real>(std::max(m, n)) * std::numeric_limits<Real>::epsilon() * sigma_max;
  out.left = ComplexMatrix<Real>::Zero(m, m);
  Index keep = 0;
  for (Index k = 0; k < n; ++k) {
    const Real s = out.singular_values(k);
    if (s <= cutoff || s == Real(0)) break;
    out.left.col(k) = g.col(order[static_cast<std::size_t>(k)]) / s;
    keep = k + 1;
  }
  complete_unitary(out.left, keep);
  normalize_phases(out.left);
  // Re-pair right vectors with the phase-normalized left vectors so the
  // factorization still reconstructs A; completion columns of `right` are
  // normalized on their own.
  for (Index k = 0; k < n; ++k) {
    if (k < keep) {
      const std::complex<Real> ref = (a * out.right.col(k)).dot(out.left.col(k));
      // ref = left_k^H A right_k ~ sigma_k * phase; undo the phase on right_k.
      const Real mag = std::abs(ref);
      if (mag > Real(0)) out.right.col(k) *= ref / mag;
    } else {
      Index best = 0;
      for (Index r = 1; r < n; ++r)
        if (std::abs(out.right(r, k)) > std::abs(out.right(best, k))) best = r;
      const Real mag = std::abs(out.right(best, k));
      if (mag > Real(0)) out.right.col(k) *= std::conj(out.right(best, k)) / mag;
    }
  }
  return out;
}

}  // namespace detail

/// Cyclic-by-row complex Jacobi eigendecomposition of a Hermitian matrix.
/// Eigenvalues are returned in descending order (stable on ties) and each
/// eigenvector is phase-normalized so its largest-magnitude entry is real
/// and nonnegative.
template <typename Real>
EigenDecomposition<Real> hermitian_eigen(const HermitianMatrix<Real>& m, const SpectralTolerances& tol = {}) {
  tol.validate();
  const Index n = m.dim();
  if (n < 1) throw std::invalid_argument("hermitian_eigen requires dim >= 1");

  ComplexMatrix<Real> a = m.matrix();
  ComplexMatrix<Real> v = ComplexMatrix<Real>::Identity(n, n);
  const Real scale = a.norm();
  const Real stop = static_cast<Real>(tol.off_diag_stop) * scale;
  // Per-element skip threshold; if every pair is skipped then
  // off(A) <= sqrt(n(n-1)) * stop / n < stop.
  const Real skip = stop / static_cast<Real>(n);

  EigenDecomposition<Real> out;
  Real off = detail::off_diagonal_norm(a);
  int sweep = 0;
  while (off > stop) {
    if (++sweep > tol.max_sweeps)
      throw SpectralError("Hermitian Jacobi", static_cast<double>(off / scale));
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const std::complex<Real> g = a(p, q);
        if (std::abs(g) <= skip) continue;
        const auto rot = detail::PlaneRotation<Real>::make(a(p, p).real(), a(q, q).real(), g);
        rot.apply_right(a, p, q);
        rot.apply_left_adjoint(a, p, q);
        a(p, q) = a(q, p) = std::complex<Real>(0);
        a(p, p) = std::complex<Real>(a(p, p).real(), Real(0));
        a(q, q) = std::complex<Real>(a(q, q).real(), Real(0));
        rot.apply_right(v, p, q);
      }
    }
    off = detail::off_diagonal_norm(a);
  }
  out.sweeps = sweep;

  RealVector<Real> diag(n);
  for (Index i = 0; i < n; ++i) diag(i) = a(i, i).real();
  const auto order = detail::descending_order(diag);
  out.eigenvalues.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = diag(src);
    out.vectors.col(k) = v.col(src);
  }
  detail::normalize_phases(out.vectors);
  return out;
}

/// Full SVD by one-sided Jacobi on the taller orientation of A.
template <typename Real>
SVDResult<Real> svd(const DenseMatrix<Real>& a, const SpectralTolerances& tol = {}) {
  tol.validate();
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("svd requires a nonempty matrix");
  if (a.rows() >= a.cols()) return detail::svd_tall<Real>(a.matrix(), tol, true);
  auto t = detail::svd_tall<Real>(a.matrix().adjoint(), tol, true);
  std::swap(t.left, t.right);
  return t;
}

/// Singular values only (same kernel, no vector accumulation).
template <typename Real>
RealVector<Real> singular_values(const DenseMatrix<Real>& a, const SpectralTolerances& tol = {}) {
  tol.validate();
  if (a.empty()) return RealVector<Real>(0);
  if (a.rows() >= a.cols()) return detail::svd_tall<Real>(a.matrix(), tol, false).singular_values;
  return detail::svd_tall<Real>(a.matrix().adjoint(), tol, false).singular_values;
}

/// Descending singular values zero-padded to target_len. Empty matrices
/// yield all zeros.
template <typename Real>
RealVector<Real> singular_values_padded(const DenseMatrix<Real>& a, Index target_len,
                                        const SpectralTolerances& tol = {}) {
  const Index k = std::min(a.rows(), a.cols());
  if (target_len < k)
    throw std::invalid_argument("singular_values_padded: target length " + std::to_string(target_len) +
                                " is below min(rows, cols) = " + std::to_string(k));
  RealVector<Real> out = RealVector<Real>::Zero(target_len);
  out.head(k) = singular_values(a, tol);
  return out;
}

}  // namespace specvec
