#pragma once

// Seeded test-matrix generation with controlled spectra.

#include <algorithm>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/QR>

#include "specvec/matrix_core.hpp"

namespace specvec {

using Rng = std::mt19937_64;

template <typename Real>
ComplexMatrix<Real> gaussian_matrix(Index rows, Index cols, Rng& rng, bool complex = true) {
  std::normal_distribution<Real> normal(Real(0), Real(1));
  ComplexMatrix<Real> g(rows, cols);
  // Fill in row-major order so the stream layout is independent of storage order.
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const Real re = normal(rng);
      const Real im = complex ? normal(rng) : Real(0);
      g(r, c) = std::complex<Real>(re, im);
    }
  return g;
}

template <typename Real>
DenseMatrix<Real> random_matrix(Index rows, Index cols, Rng& rng, bool complex = true) {
  return DenseMatrix<Real>(gaussian_matrix<Real>(rows, cols, rng, complex));
}

/// Haar-distributed unitary (orthogonal when !complex): QR of a Gaussian
/// matrix with the phases of diag(R) moved into Q.
template <typename Real>
ComplexMatrix<Real> random_unitary(Index n, Rng& rng, bool complex = true) {
  const ComplexMatrix<Real> g = gaussian_matrix<Real>(n, n, rng, complex);
  Eigen::HouseholderQR<ComplexMatrix<Real>> qr(g);
  ComplexMatrix<Real> q = qr.householderQ() * ComplexMatrix<Real>::Identity(n, n);
  const ComplexMatrix<Real>& r = qr.matrixQR();
  for (Index k = 0; k < n; ++k) {
    const Real mag = std::abs(r(k, k));
    if (mag > Real(0)) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

/// L * diag(spectrum, zero-padded) * R^H with seeded random unitary L (rows x rows)
/// and R (cols x cols). Spectrum entries must be nonnegative; at most min(rows, cols).
template <typename Real>
DenseMatrix<Real> matrix_with_spectrum(Index rows, Index cols, const std::vector<Real>& spectrum, Rng& rng,
                                       bool complex = true) {
  const Index k = static_cast<Index>(spectrum.size());
  if (k > std::min(rows, cols))
    throw std::invalid_argument("spectrum has more values than min(rows, cols)");
  for (Real s : spectrum)
    if (!(s >= Real(0))) throw std::invalid_argument("spectrum values must be nonnegative");
  const ComplexMatrix<Real> l = random_unitary<Real>(rows, rng, complex);
  const ComplexMatrix<Real> r = random_unitary<Real>(cols, rng, complex);
  ComplexMatrix<Real> a = ComplexMatrix<Real>::Zero(rows, cols);
  for (Index i = 0; i < k; ++i) a += spectrum[static_cast<std::size_t>(i)] * l.col(i) * r.col(i).adjoint();
  return DenseMatrix<Real>(std::move(a));
}

template <typename Real>
HermitianMatrix<Real> random_hermitian(Index n, Rng& rng) {
  const ComplexMatrix<Real> g = gaussian_matrix<Real>(n, n, rng, true);
  return HermitianMatrix<Real>(((g + g.adjoint()) / Real(2)).eval());
}

/// Q diag(eigenvalues) Q^H for a seeded random unitary Q.
template <typename Real>
HermitianMatrix<Real> hermitian_with_eigenvalues(const std::vector<Real>& eigenvalues, Rng& rng) {
  const Index n = static_cast<Index>(eigenvalues.size());
  const ComplexMatrix<Real> q = random_unitary<Real>(n, rng, true);
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(n, n);
  for (Index i = 0; i < n; ++i) m += eigenvalues[static_cast<std::size_t>(i)] * q.col(i) * q.col(i).adjoint();
  return HermitianMatrix<Real>(((m + m.adjoint()) / Real(2)).eval());
}

}  // namespace specvec
