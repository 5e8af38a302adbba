#pragma once

// Independent checks of the identity engine: direct-decomposition oracle,
// interlacing, Gram/deletion structure, product-form residuals and a
// perturbation harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "specvec/generate.hpp"
#include "specvec/identity.hpp"
#include "specvec/matrix_core.hpp"
#include "specvec/spectral.hpp"

namespace specvec {

template <typename Real>
struct OracleGrids {
  RealMatrix<Real> left;   // (i, j) = |u_ij|^2 = |L(j, i)|^2, m x m
  RealMatrix<Real> right;  // (l, s) = |v_ls|^2 = |R(s, l)|^2, n x n
};

/// Squared magnitudes of the full SVD factors, laid out like MagnitudeMatrix.
template <typename Real>
OracleGrids<Real> oracle_magnitudes(const DenseMatrix<Real>& a, const SpectralTolerances& tol = {}) {
  const auto s = svd(a, tol);
  return {s.left.cwiseAbs2().transpose(), s.right.cwiseAbs2().transpose()};
}

/// |v_ij|^2 from the Jacobi eigenvectors, row i = eigenvector i.
template <typename Real>
RealMatrix<Real> eigen_oracle_magnitudes(const HermitianMatrix<Real>& m, const SpectralTolerances& tol = {}) {
  return hermitian_eigen(m, tol).vectors.cwiseAbs2().transpose();
}

template <typename Real>
struct ErrorReport {
  Real max_abs_err = 0;
  Real mean_abs_err = 0;
  std::pair<Index, Index> worst_cell{0, 0};
  std::optional<RealMatrix<Real>> per_cell;  // NaN where excluded
  GapReport<Real> gap_context;
  Index compared_cells = 0;
  Index excluded_cells = 0;  // indeterminate cells
};

template <typename Real>
ErrorReport<Real> compare(const MagnitudeMatrix<Real>& recovered, const RealMatrix<Real>& oracle,
                          const GapReport<Real>& gaps = {}, bool keep_per_cell = false) {
  if (oracle.rows() != recovered.dim || oracle.cols() != recovered.dim)
    throw std::invalid_argument("compare: dimension mismatch (" + std::to_string(recovered.dim) + " vs " +
                                std::to_string(oracle.rows()) + "x" + std::to_string(oracle.cols()) + ")");
  ErrorReport<Real> r;
  r.gap_context = gaps;
  if (keep_per_cell)
    r.per_cell = RealMatrix<Real>::Constant(recovered.dim, recovered.dim, std::numeric_limits<Real>::quiet_NaN());
  Real sum = 0;
  for (Index i = 0; i < recovered.dim; ++i)
    for (Index j = 0; j < recovered.dim; ++j) {
      const auto& c = recovered.cell(i, j);
      if (!c.determinate()) {
        ++r.excluded_cells;
        continue;
      }
      const Real d = std::abs(c.value - oracle(i, j));
      if (r.per_cell) (*r.per_cell)(i, j) = d;
      sum += d;
      if (r.compared_cells == 0 || d > r.max_abs_err) {
        r.max_abs_err = d;
        r.worst_cell = {i, j};
      }
      ++r.compared_cells;
    }
  if (r.compared_cells > 0) r.mean_abs_err = sum / static_cast<Real>(r.compared_cells);
  return r;
}

enum class InterlacingBound {
  Upper,  // sigma_k(full) + slack >= sigma_k(deleted)
  Lower,  // sigma_k(deleted) + slack >= sigma_{k+1}(full)
};

template <typename Real>
struct InterlacingViolation {
  Index k;
  Real lhs;
  Real rhs;
  InterlacingBound which;
};

template <typename Real>
struct InterlacingReport {
  std::vector<InterlacingViolation<Real>> violations;
  Real max_violation_magnitude = 0;
  bool ok() const noexcept { return violations.empty(); }
};

/// Interlacing between a (padded) spectrum and that of a one-row
/// or one-column deletion (padded to one shorter).
template <typename Real>
InterlacingReport<Real> check_interlacing(const RealVector<Real>& sv_full, const RealVector<Real>& sv_deleted,
                                          Real slack) {
  if (sv_deleted.size() != sv_full.size() - 1)
    throw std::invalid_argument("check_interlacing: deleted spectrum must be one shorter");
  InterlacingReport<Real> r;
  for (Index k = 0; k < sv_deleted.size(); ++k) {
    const Real upper = sv_deleted(k) - sv_full(k);
    const Real lower = sv_full(k + 1) - sv_deleted(k);
    r.max_violation_magnitude = std::max({r.max_violation_magnitude, upper, lower});
    if (upper > slack) r.violations.push_back({k, sv_full(k), sv_deleted(k), InterlacingBound::Upper});
    if (lower > slack) r.violations.push_back({k, sv_deleted(k), sv_full(k + 1), InterlacingBound::Lower});
  }
  return r;
}

template <typename Real>
struct InterlacingSummary {
  Index deletions_checked = 0;
  Index violations = 0;
  Real max_violation = 0;
  Real slack = 0;
  bool ok() const noexcept { return violations == 0; }
};

/// Interlacing over every row deletion (Side::Left) or column deletion
/// (Side::Right) of A, slack = rel_slack * sigma_1(A).
template <typename Real>
InterlacingSummary<Real> interlacing_sweep(const DenseMatrix<Real>& a, Side side, Real rel_slack = Real(1e-10),
                                           const SpectralTolerances& tol = {}) {
  const Index dim = side == Side::Left ? a.rows() : a.cols();
  const RealVector<Real> full = singular_values_padded(a, dim, tol);
  InterlacingSummary<Real> s;
  s.slack = rel_slack * (full.size() > 0 ? full(0) : Real(0));
  for (Index j = 0; j < dim; ++j) {
    const auto sub = side == Side::Left ? delete_row(a, j) : delete_col(a, j);
    const auto rep = check_interlacing(full, singular_values_padded(sub, dim - 1, tol), s.slack);
    ++s.deletions_checked;
    s.violations += static_cast<Index>(rep.violations.size());
    s.max_violation = std::max(s.max_violation, rep.max_violation_magnitude);
  }
  return s;
}

/// ||gram_right(delete_row(A, j)) - delete_row_col(gram_right(A), j)||_F.
template <typename Real>
Real check_gram_deletion(const DenseMatrix<Real>& a, Index j) {
  const auto direct = delete_row(a, j);
  if (direct.rows() == 0) return Real(0);
  return (gram_right(direct).matrix() - delete_row_col(gram_right(a), j).matrix()).norm();
}

/// Column dual: ||gram_left(delete_col(A, s)) - delete_row_col(gram_left(A), s)||_F.
template <typename Real>
Real check_gram_deletion_col(const DenseMatrix<Real>& a, Index s) {
  const auto direct = delete_col(a, s);
  if (direct.cols() == 0) return Real(0);
  return (gram_left(direct).matrix() - delete_row_col(gram_left(a), s).matrix()).norm();
}

namespace detail {

/// scale^count as a SignedLogValue, 1 when scale is zero.
template <typename Real>
SignedLogValue<Real> normalizer(Real scale, Index count) {
  auto p = SignedLogValue<Real>::one();
  if (scale <= Real(0)) return p;
  for (Index k = 0; k < count; ++k) p *= SignedLogValue<Real>(scale);
  return p;
}

template <typename Real>
Real product_residual(const MagnitudeMatrix<Real>& mags, const RealMatrix<Real>& oracle, Real scale) {
  const auto norm = normalizer(scale, mags.dim - 1);
  Real worst = 0;
  for (Index i = 0; i < mags.dim; ++i)
    for (Index j = 0; j < mags.dim; ++j) {
      const auto& sides = mags.cell(i, j).sides;
      const Real lhs = (sides.lhs_coefficient / norm).to_real();
      const Real rhs = (sides.rhs / norm).to_real();
      worst = std::max(worst, std::abs(lhs * oracle(i, j) - rhs));
    }
  return worst;
}

}  // namespace detail

template <typename Real>
struct ProductIdentityResidual {
  Real left = 0;
  Real right = 0;
  Real max() const { return std::max(left, right); }
};

/// Product-form residual |lhs * |u_ij|^2 - rhs| against the oracle, over
/// every cell of both sides, normalized by sigma_1^(2(m-1)) resp.
/// sigma_1^(2(n-1)). No division, so it holds on degenerate spectra.
template <typename Real>
ProductIdentityResidual<Real> product_identity_residuals(const DenseMatrix<Real>& a, const IdentityOptions& opts = {}) {
  const auto oracle = oracle_magnitudes(a, opts.spectral);
  const auto left = recover_left_magnitudes(a, opts);
  const auto right = recover_right_magnitudes(a, opts);
  const Real s1 = left.spectrum.size() > 0 ? left.spectrum(0) : Real(0);
  return {detail::product_residual(left.magnitudes, oracle.left, s1 * s1),
          detail::product_residual(right.magnitudes, oracle.right, s1 * s1)};
}

template <typename Real>
Real check_product_identity(const DenseMatrix<Real>& a, const IdentityOptions& opts = {}) {
  return product_identity_residuals(a, opts).max();
}

/// Hermitian analogue, normalized by max|lambda|^(n-1).
template <typename Real>
Real check_eig_product_identity(const HermitianMatrix<Real>& m, const IdentityOptions& opts = {}) {
  const auto oracle = eigen_oracle_magnitudes(m, opts.spectral);
  const auto rec = recover_eigvec_magnitudes(m, opts);
  const Real scale = rec.spectrum.size() > 0 ? rec.spectrum.cwiseAbs().maxCoeff() : Real(0);
  return detail::product_residual(rec.magnitudes, oracle, scale);
}

template <typename Real>
struct TrialRecord {
  Index trial = 0;
  bool skipped = false;
  Real max_drift = 0;
  Real min_rel_gap = 0;
  Index compared_cells = 0;
};

template <typename Real>
struct Quantiles {
  Real min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

template <typename Real>
struct StabilityReport {
  Real epsilon = 0;
  Index trials = 0;
  std::uint64_t seed = 0;
  Real base_min_rel_gap = 0;
  std::vector<TrialRecord<Real>> records;
  Index skipped = 0;
  Quantiles<Real> drift_summary;
  Quantiles<Real> gap_summary;
};

namespace detail {

/// Nearest-rank quantiles.
template <typename Real>
Quantiles<Real> quantiles(std::vector<Real> v) {
  Quantiles<Real> q;
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  auto at = [&](double p) {
    const auto n = v.size();
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return v[rank - 1];
  };
  q.min = v.front();
  q.q25 = at(0.25);
  q.median = at(0.5);
  q.q75 = at(0.75);
  q.max = v.back();
  return q;
}

template <typename Real>
void accumulate_drift(const MagnitudeMatrix<Real>& base, const MagnitudeMatrix<Real>& trial, Real& worst,
                      Index& compared) {
  for (Index i = 0; i < base.dim; ++i)
    for (Index j = 0; j < base.dim; ++j) {
      const auto& b = base.cell(i, j);
      const auto& t = trial.cell(i, j);
      if (!b.determinate() || !t.determinate()) continue;
      worst = std::max(worst, std::abs(b.value - t.value));
      ++compared;
    }
}

}  // namespace detail

/// Recover left and right magnitudes of A + E for `trials` seeded
/// perturbations with ||E||_F = epsilon * ||A||_F and record the drift
/// from the unperturbed recovery together with the gap evolution.
template <typename Real>
StabilityReport<Real> perturb_study(const DenseMatrix<Real>& a, Real epsilon, Index trials, std::uint64_t seed,
                                    const IdentityOptions& opts = {}) {
  if (!(epsilon >= Real(0)) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  StabilityReport<Real> rep;
  rep.epsilon = epsilon;
  rep.trials = trials;
  rep.seed = seed;

  const auto base_left = recover_left_magnitudes(a, opts);
  const auto base_right = recover_right_magnitudes(a, opts);
  rep.base_min_rel_gap = std::min(base_left.gaps.min_rel_gap, base_right.gaps.min_rel_gap);

  Rng rng(seed);
  const Real target = epsilon * frobenius_norm(a);
  std::vector<Real> drifts, gaps;
  for (Index t = 0; t < trials; ++t) {
    // The noise stream advances even for skipped trials, keeping later trials reproducible.
    ComplexMatrix<Real> e = gaussian_matrix<Real>(a.rows(), a.cols(), rng, true);
    const Real en = e.norm();
    e *= en > Real(0) ? target / en : Real(0);
    TrialRecord<Real> rec;
    rec.trial = t;
    try {
      const DenseMatrix<Real> p(ComplexMatrix<Real>(a.matrix() + e));
      const auto l = recover_left_magnitudes(p, opts);
      const auto r = recover_right_magnitudes(p, opts);
      detail::accumulate_drift(base_left.magnitudes, l.magnitudes, rec.max_drift, rec.compared_cells);
      detail::accumulate_drift(base_right.magnitudes, r.magnitudes, rec.max_drift, rec.compared_cells);
      rec.min_rel_gap = std::min(l.gaps.min_rel_gap, r.gaps.min_rel_gap);
      drifts.push_back(rec.max_drift);
      gaps.push_back(rec.min_rel_gap);
    } catch (const SpectralError&) {
      rec.skipped = true;
      ++rep.skipped;
    }
    rep.records.push_back(rec);
  }
  rep.drift_summary = detail::quantiles(drifts);
  rep.gap_summary = detail::quantiles(gaps);
  return rep;
}

}  // namespace specvec
