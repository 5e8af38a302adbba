#pragma once

// Singular-vector and eigenvector magnitudes from spectra alone.
//
// Hermitian M with eigenvalues l_1 >= ... >= l_n and principal minors M_j:
//   |v_ij|^2 * prod_{k != i} (l_i - l_k) = prod_k (l_i - l_k(M_j))
// General A (m x n) with singular values zero-padded to max(m, n):
//   |u_ij|^2 * prod_{k != i} (s_i^2 - s_k^2) = prod_{k <= m-1} (s_i^2 - s_k^2(A without row j))
//   |v_ls|^2 * prod_{t != l} (s_l^2 - s_t^2) = prod_{t <= n-1} (s_l^2 - s_t^2(A without column s))
// Row i of a magnitude matrix indexes the vector, column j its component.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "specvec/matrix_core.hpp"
#include "specvec/parallel.hpp"
#include "specvec/signed_log.hpp"
#include "specvec/spectral.hpp"

namespace specvec {

enum class Side { Left, Right, Eigen };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Eigen: return "eigen";
  }
  return "?";
}

enum class CellStatus {
  Determinate,          // raw value already in [0, 1]
  Clamped,              // raw within clamp_bound of [0, 1], clamped
  ConditioningFailure,  // raw further outside [0, 1]; clamped but flagged
  Indeterminate,        // the gap product vanishes; no magnitude is implied
};

inline const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Determinate: return "ok";
    case CellStatus::Clamped: return "clamped";
    case CellStatus::ConditioningFailure: return "conditioning_failure";
    case CellStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct IdentityOptions {
  SpectralTolerances spectral{};
  /// Relative gap (on squared singular values, or on eigenvalues) below
  /// which two spectrum entries count as repeated.
  double distinct_threshold = 1e-8;
  /// Largest excursion outside [0, 1] treated as roundoff.
  double clamp_bound = 1e-6;
  /// Lower bound on the gap normalizer, so the zero matrix has finite gaps.
  double gap_floor = 1e-300;
  /// Workers for the per-submatrix decompositions; 0 defers to SPECVEC_THREADS.
  unsigned threads = 0;
};

/// Raised when a ratio form is requested on a spectrum with repeated values.
class GapError : public std::domain_error {
 public:
  explicit GapError(const std::string& what) : std::domain_error(what) {}
};

template <typename Real>
struct GapReport {
  Real min_abs_gap = std::numeric_limits<Real>::infinity();
  Real min_rel_gap = std::numeric_limits<Real>::infinity();
  bool distinct = true;
};

/// Both sides of a product identity: lhs_coefficient * |x|^2 = rhs.
template <typename Real>
struct ProductSides {
  SignedLogValue<Real> lhs_coefficient;
  SignedLogValue<Real> rhs;
};

template <typename Real>
struct CellEstimate {
  Real value = 0;
  Real raw = std::numeric_limits<Real>::quiet_NaN();
  bool clamped = false;
  /// Largest spectrum scale over the smallest denominator gap used.
  Real cond_score = 1;
  CellStatus status = CellStatus::Indeterminate;
  ProductSides<Real> sides;

  bool determinate() const noexcept { return status != CellStatus::Indeterminate; }
};

template <typename Real>
struct MagnitudeMatrix {
  Side side = Side::Left;
  Index dim = 0;
  Real clamp_bound = Real(1e-6);
  std::vector<CellEstimate<Real>> cells;  // row-major dim x dim

  const CellEstimate<Real>& cell(Index i, Index j) const {
    return cells[static_cast<std::size_t>(i * dim + j)];
  }
  CellEstimate<Real>& cell(Index i, Index j) { return cells[static_cast<std::size_t>(i * dim + j)]; }

  /// Values with NaN in indeterminate cells.
  RealMatrix<Real> values() const {
    RealMatrix<Real> out(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) {
        const auto& c = cell(i, j);
        out(i, j) = c.determinate() ? c.value : std::numeric_limits<Real>::quiet_NaN();
      }
    return out;
  }

  Index indeterminate_count() const {
    return static_cast<Index>(std::count_if(cells.begin(), cells.end(),
                                            [](const auto& c) { return !c.determinate(); }));
  }
};

template <typename Real>
struct Recovery {
  MagnitudeMatrix<Real> magnitudes;
  GapReport<Real> gaps;
  /// Spectrum of the full matrix: zero-padded singular values or eigenvalues.
  RealVector<Real> spectrum;
};

namespace detail {

template <typename Real>
RealVector<Real> squares(const RealVector<Real>& v) {
  return v.array().square().matrix();
}

template <typename Real>
GapReport<Real> spectrum_gaps(const RealVector<Real>& x, Real scale, double threshold) {
  GapReport<Real> g;
  for (Index i = 0; i < x.size(); ++i)
    for (Index k = i + 1; k < x.size(); ++k) g.min_abs_gap = std::min(g.min_abs_gap, std::abs(x(i) - x(k)));
  g.min_rel_gap = g.min_abs_gap / scale;
  g.distinct = g.min_rel_gap >= static_cast<Real>(threshold);
  return g;
}

/// Smallest |x_i - x_k| / scale over k != i; +inf when there is no other entry.
template <typename Real>
Real row_rel_gap(const RealVector<Real>& x, Index i, Real scale) {
  Real g = std::numeric_limits<Real>::infinity();
  for (Index k = 0; k < x.size(); ++k)
    if (k != i) g = std::min(g, std::abs(x(i) - x(k)));
  return g / scale;
}

inline void require_lengths(Index full, Index minor, Index i, const char* what) {
  if (minor != full - 1)
    throw std::invalid_argument(std::string(what) + ": submatrix spectrum has length " + std::to_string(minor) +
                                ", expected " + std::to_string(full - 1));
  if (i < 0 || i >= full)
    throw std::out_of_range(std::string(what) + ": index " + std::to_string(i) + " out of range");
}

template <typename Real>
std::vector<Real> lhs_terms(const RealVector<Real>& full, Index i) {
  std::vector<Real> t;
  t.reserve(static_cast<std::size_t>(full.size()));
  for (Index k = 0; k < full.size(); ++k)
    if (k != i) t.push_back(full(i) - full(k));
  return t;
}

template <typename Real>
std::vector<Real> rhs_terms(const RealVector<Real>& full, const RealVector<Real>& minor, Index i) {
  std::vector<Real> t;
  t.reserve(static_cast<std::size_t>(minor.size()));
  for (Index k = 0; k < minor.size(); ++k) t.push_back(full(i) - minor(k));
  return t;
}

template <typename Real>
ProductSides<Real> identity_sides(const RealVector<Real>& full, const RealVector<Real>& minor, Index i,
                                  const char* what) {
  require_lengths(full.size(), minor.size(), i, what);
  const auto l = lhs_terms(full, i);
  const auto r = rhs_terms(full, minor, i);
  return {signed_product<Real>(l), signed_product<Real>(r)};
}

template <typename Real>
void classify(CellEstimate<Real>& c, Real raw, double clamp_bound) {
  c.raw = raw;
  c.value = std::clamp(raw, Real(0), Real(1));
  c.clamped = !(raw >= Real(0) && raw <= Real(1));
  const Real b = static_cast<Real>(clamp_bound);
  if (!c.clamped)
    c.status = CellStatus::Determinate;
  else if (raw >= -b && raw <= Real(1) + b)
    c.status = CellStatus::Clamped;
  else
    c.status = CellStatus::ConditioningFailure;
}

/// One cell from a (transformed) spectrum and its minor's spectrum. Cells
/// whose row gap is below the distinctness threshold are indeterminate.
template <typename Real>
CellEstimate<Real> identity_cell(const RealVector<Real>& full, const RealVector<Real>& minor, Index i, Real scale,
                                 const IdentityOptions& opts, const char* what) {
  CellEstimate<Real> c;
  c.sides = identity_sides(full, minor, i, what);
  const Real rel = row_rel_gap(full, i, scale);
  c.cond_score = std::isinf(rel) ? Real(1) : Real(1) / rel;
  if (!(rel >= static_cast<Real>(opts.distinct_threshold))) return c;
  classify(c, (c.sides.rhs / c.sides.lhs_coefficient).to_real(), opts.clamp_bound);
  return c;
}

template <typename Real>
Real spectrum_scale(const RealVector<Real>& x, double floor) {
  const Real top = x.size() == 0 ? Real(0) : x.cwiseAbs().maxCoeff();
  return std::max(top, static_cast<Real>(floor));
}

}  // namespace detail

/// (prod numer) / (prod denom) via signed mantissa/exponent accumulation.
/// A zero numerator term short-circuits to exactly 0.
template <typename Real>
Real stable_ratio(const std::vector<Real>& numer, const std::vector<Real>& denom) {
  for (Real d : denom)
    if (d == Real(0)) throw std::domain_error("stable_ratio: zero denominator term");
  for (Real x : numer)
    if (x == Real(0)) return Real(0);
  return (signed_product<Real>(numer) / signed_product<Real>(denom)).to_real();
}

/// Gap structure of the squared singular values.
template <typename Real>
GapReport<Real> gap_diagnostics(const RealVector<Real>& sv, double floor = 1e-300, double threshold = 1e-8) {
  const RealVector<Real> x = detail::squares(sv);
  return detail::spectrum_gaps(x, detail::spectrum_scale(x, floor), threshold);
}

/// Gap structure of a list of eigenvalues, relative to the spectral radius.
template <typename Real>
GapReport<Real> eigen_gap_diagnostics(const RealVector<Real>& eigs, double floor = 1e-300,
                                      double threshold = 1e-8) {
  return detail::spectrum_gaps(eigs, detail::spectrum_scale(eigs, floor), threshold);
}

/// Both sides of the Hermitian product identity; valid for repeated eigenvalues.
template <typename Real>
ProductSides<Real> eigvec_identity_products(const RealVector<Real>& eigs_full, const RealVector<Real>& eigs_minor,
                                            Index i) {
  return detail::identity_sides(eigs_full, eigs_minor, i, "eigvec_identity_products");
}

/// |v_ij|^2 as a ratio of eigenvalue differences. Requires distinct eigenvalues.
template <typename Real>
CellEstimate<Real> eigvec_magnitude_ratio(const RealVector<Real>& eigs_full, const RealVector<Real>& eigs_minor,
                                          Index i, const IdentityOptions& opts = {}) {
  detail::require_lengths(eigs_full.size(), eigs_minor.size(), i, "eigvec_magnitude_ratio");
  const auto gaps = eigen_gap_diagnostics(eigs_full, opts.gap_floor, opts.distinct_threshold);
  if (!gaps.distinct)
    throw GapError("eigvec_magnitude_ratio: repeated eigenvalue (relative gap " + std::to_string(gaps.min_rel_gap) +
                   "); use eigvec_identity_products");
  const Real scale = detail::spectrum_scale(eigs_full, opts.gap_floor);
  CellEstimate<Real> c;
  c.sides = eigvec_identity_products(eigs_full, eigs_minor, i);
  const Real rel = detail::row_rel_gap(eigs_full, i, scale);
  c.cond_score = std::isinf(rel) ? Real(1) : Real(1) / rel;
  detail::classify(c, stable_ratio(detail::rhs_terms(eigs_full, eigs_minor, i), detail::lhs_terms(eigs_full, i)),
                   opts.clamp_bound);
  return c;
}

/// Left product identity sides for singular index i and deleted row j,
/// given sv(A) padded to m and sv(A without row j) padded to m - 1.
template <typename Real>
ProductSides<Real> left_cell_products(const RealVector<Real>& sv_a_padded, const RealVector<Real>& sv_rowdel_padded,
                                      Index i) {
  return detail::identity_sides<Real>(detail::squares(sv_a_padded), detail::squares(sv_rowdel_padded), i,
                                      "left_cell_products");
}

/// Right product identity sides; sv(A) padded to n, sv(A without column s) padded to n - 1.
template <typename Real>
ProductSides<Real> right_cell_products(const RealVector<Real>& sv_a_padded, const RealVector<Real>& sv_coldel_padded,
                                       Index l) {
  return detail::identity_sides<Real>(detail::squares(sv_a_padded), detail::squares(sv_coldel_padded), l,
                                      "right_cell_products");
}

namespace detail {

template <typename Real>
CellEstimate<Real> singular_cell_ratio(const RealVector<Real>& sv_a, const RealVector<Real>& sv_del, Index i,
                                       const IdentityOptions& opts, const char* what) {
  require_lengths(sv_a.size(), sv_del.size(), i, what);
  const auto gaps = gap_diagnostics(sv_a, opts.gap_floor, opts.distinct_threshold);
  if (!gaps.distinct)
    throw GapError(std::string(what) + ": repeated squared singular value (relative gap " +
                   std::to_string(gaps.min_rel_gap) + "); use the product form");
  const RealVector<Real> full = squares(sv_a);
  const RealVector<Real> minor = squares(sv_del);
  const Real scale = spectrum_scale(full, opts.gap_floor);
  CellEstimate<Real> c;
  c.sides = identity_sides(full, minor, i, what);
  const Real rel = row_rel_gap(full, i, scale);
  c.cond_score = std::isinf(rel) ? Real(1) : Real(1) / rel;
  classify(c, stable_ratio(rhs_terms(full, minor, i), lhs_terms(full, i)), opts.clamp_bound);
  return c;
}

}  // namespace detail

/// |u_ij|^2 for distinct singular values.
template <typename Real>
CellEstimate<Real> left_cell_ratio(const RealVector<Real>& sv_a, const RealVector<Real>& sv_rowdel, Index i,
                                   const IdentityOptions& opts = {}) {
  return detail::singular_cell_ratio(sv_a, sv_rowdel, i, opts, "left_cell_ratio");
}

/// |v_ls|^2 for distinct singular values.
template <typename Real>
CellEstimate<Real> right_cell_ratio(const RealVector<Real>& sv_a, const RealVector<Real>& sv_coldel, Index l,
                                    const IdentityOptions& opts = {}) {
  return detail::singular_cell_ratio(sv_a, sv_coldel, l, opts, "right_cell_ratio");
}

namespace detail {

template <typename Real>
Recovery<Real> recover_singular_side(const DenseMatrix<Real>& a, Side side, const IdentityOptions& opts) {
  if (a.empty()) throw std::invalid_argument("recovery requires a nonempty matrix");
  const Index dim = side == Side::Left ? a.rows() : a.cols();

  Recovery<Real> out;
  out.spectrum = singular_values_padded(a, dim, opts.spectral);
  out.gaps = gap_diagnostics(out.spectrum, opts.gap_floor, opts.distinct_threshold);
  const RealVector<Real> full = squares(out.spectrum);
  const Real scale = spectrum_scale(full, opts.gap_floor);

  // One decomposition per deleted row (column), shared by every i.
  std::vector<RealVector<Real>> minors(static_cast<std::size_t>(dim));
  parallel_for(dim, resolve_threads(opts.threads), [&](Index j) {
    try {
      const auto sub = side == Side::Left ? delete_row(a, j) : delete_col(a, j);
      minors[static_cast<std::size_t>(j)] = squares(singular_values_padded(sub, dim - 1, opts.spectral));
    } catch (const SpectralError& e) {
      throw SpectralError(std::string(side == Side::Left ? "row" : "column") + "-deleted submatrix " +
                              std::to_string(j + 1),
                          e.residual());
    }
  });

  auto& mags = out.magnitudes;
  mags.side = side;
  mags.dim = dim;
  mags.clamp_bound = static_cast<Real>(opts.clamp_bound);
  mags.cells.resize(static_cast<std::size_t>(dim * dim));
  const char* what = side == Side::Left ? "left_cell_products" : "right_cell_products";
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      mags.cell(i, j) = identity_cell(full, minors[static_cast<std::size_t>(j)], i, scale, opts, what);
  return out;
}

}  // namespace detail

/// |u_ij|^2 for every singular index i and row j of A, using only singular
/// values of A and of its m row-deleted submatrices. Rows i whose squared
/// singular value is repeated (within the distinctness threshold) are
/// indeterminate; their product sides are still reported.
template <typename Real>
Recovery<Real> recover_left_magnitudes(const DenseMatrix<Real>& a, const IdentityOptions& opts = {}) {
  return detail::recover_singular_side(a, Side::Left, opts);
}

/// |v_ls|^2 for every singular index l and column s of A.
template <typename Real>
Recovery<Real> recover_right_magnitudes(const DenseMatrix<Real>& a, const IdentityOptions& opts = {}) {
  return detail::recover_singular_side(a, Side::Right, opts);
}

/// |v_ij|^2 for a Hermitian matrix from its eigenvalues and those of its principal minors.
template <typename Real>
Recovery<Real> recover_eigvec_magnitudes(const HermitianMatrix<Real>& m, const IdentityOptions& opts = {}) {
  const Index n = m.dim();
  if (n < 1) throw std::invalid_argument("recover_eigvec_magnitudes requires dim >= 1");
  Recovery<Real> out;
  out.spectrum = hermitian_eigen(m, opts.spectral).eigenvalues;
  out.gaps = eigen_gap_diagnostics(out.spectrum, opts.gap_floor, opts.distinct_threshold);
  const Real scale = detail::spectrum_scale(out.spectrum, opts.gap_floor);

  std::vector<RealVector<Real>> minors(static_cast<std::size_t>(n), RealVector<Real>(0));
  if (n > 1) {
    parallel_for(n, resolve_threads(opts.threads), [&](Index j) {
      minors[static_cast<std::size_t>(j)] = hermitian_eigen(delete_row_col(m, j), opts.spectral).eigenvalues;
    });
  }

  auto& mags = out.magnitudes;
  mags.side = Side::Eigen;
  mags.dim = n;
  mags.clamp_bound = static_cast<Real>(opts.clamp_bound);
  mags.cells.resize(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      mags.cell(i, j) =
          detail::identity_cell(out.spectrum, minors[static_cast<std::size_t>(j)], i, scale, opts,
                                "eigvec_identity_products");
  return out;
}

}  // namespace specvec
