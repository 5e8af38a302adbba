#include "doctest.h"
#include "specvec/generate.hpp"
#include "specvec/identity.hpp"
#include "test_support.hpp"

#include <cstring>
#include <limits>
#include <numeric>

using namespace specvec;
using specvec::test::vec;

namespace {

/// Long-double product ratio, the reference for stable_ratio.
long double reference_ratio(const std::vector<double>& numer, const std::vector<double>& denom) {
  long double r = 1.0L;
  for (std::size_t k = 0; k < std::max(numer.size(), denom.size()); ++k) {
    if (k < numer.size()) r *= static_cast<long double>(numer[k]);
    if (k < denom.size()) r /= static_cast<long double>(denom[k]);
  }
  return r;
}

double max_cell_error(const MagnitudeMatrix<double>& m, const RealMatrix<double>& ref) {
  double worst = 0;
  for (Index i = 0; i < m.dim; ++i)
    for (Index j = 0; j < m.dim; ++j)
      if (m.cell(i, j).determinate()) worst = std::max(worst, std::abs(m.cell(i, j).value - ref(i, j)));
  return worst;
}

double max_value_diff(const MagnitudeMatrix<double>& a, const MagnitudeMatrix<double>& b) {
  double worst = 0;
  for (Index i = 0; i < a.dim; ++i)
    for (Index j = 0; j < a.dim; ++j) worst = std::max(worst, std::abs(a.cell(i, j).value - b.cell(i, j).value));
  return worst;
}

}  // namespace

TEST_CASE("SignedLogValue round trips and survives extreme products") {
  for (double x : {1.0, -2.5, 3e-300, -7e300, 0.1, 4.9e-324}) {
    const SignedLogValue<double> v(x);
    CHECK(v.to_real() == x);
    CHECK(v.log_magnitude() == doctest::Approx(std::log(std::abs(x))));
  }
  CHECK(SignedLogValue<double>(0.0).is_zero());
  CHECK(SignedLogValue<double>(0.0).to_real() == 0.0);

  std::vector<double> tiny(400, 1e-10);
  const auto p = signed_product<double>(tiny);
  CHECK(p.sign() == 1);
  CHECK(p.log_magnitude() == doctest::Approx(400 * std::log(1e-10)).epsilon(1e-13));
  CHECK(p.to_real() == 0.0);  // saturates only on conversion
  CHECK((p / p).to_real() == 1.0);

  CHECK(signed_product<double>(std::vector<double>{}).to_real() == 1.0);
  CHECK(signed_product<double>(std::vector<double>{-2, 3, -4}).to_real() == 24.0);
  CHECK(signed_product<double>(std::vector<double>{-2, 0, -4}).is_zero());
}

TEST_CASE("stable_ratio examples") {
  CHECK(stable_ratio<double>({3}, {3}) == 1.0);
  CHECK(stable_ratio<double>({0, 5}, {2, 2}) == 0.0);
  CHECK_THROWS_AS(stable_ratio<double>({1}, {0}), std::domain_error);

  const std::vector<double> small(50, 1e-8);
  CHECK(std::abs(stable_ratio(small, small) - 1.0) <= 1e-12);
}

TEST_CASE("stable_ratio stays within 4 ulp per term of an extended-precision reference") {
  Rng rng(404);
  std::uniform_real_distribution<double> mant(0.5, 2.0);
  std::uniform_int_distribution<int> expo(-60, 60);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nn = 1 + rng() % 30, nd = 1 + rng() % 30;
    std::vector<double> numer(nn), denom(nd);
    for (auto& x : numer) x = (rng() % 2 ? 1 : -1) * std::ldexp(mant(rng), expo(rng));
    for (auto& x : denom) x = (rng() % 2 ? 1 : -1) * std::ldexp(mant(rng), expo(rng));
    const long double ref = reference_ratio(numer, denom);
    const double got = stable_ratio(numer, denom);
    const double bound = 4 * std::numeric_limits<double>::epsilon() * static_cast<double>(nn + nd);
    CHECK(static_cast<double>(std::abs((static_cast<long double>(got) - ref) / ref)) <= bound);
  }
}

TEST_CASE("gap_diagnostics") {
  const auto a = gap_diagnostics(vec({2, 1}));
  CHECK(a.min_abs_gap == 3.0);
  CHECK(a.min_rel_gap == doctest::Approx(0.75));
  CHECK(a.distinct);

  const auto b = gap_diagnostics(vec({1, 1, 0}));
  CHECK(b.min_abs_gap == 0.0);
  CHECK_FALSE(b.distinct);

  // (1 + 1e-9)^2 - 1 = 2e-9 + 1e-18 relative to ~1: below the 1e-8 threshold.
  const auto c = gap_diagnostics(vec({1 + 1e-9, 1}));
  CHECK(c.min_abs_gap == doctest::Approx(2e-9).epsilon(1e-6));
  CHECK_FALSE(c.distinct);

  const auto single = gap_diagnostics(vec({5}));
  CHECK(single.distinct);
  const auto zero = gap_diagnostics(vec({0, 0}));
  CHECK_FALSE(zero.distinct);
}

TEST_CASE("eigvec_magnitude_ratio examples") {
  const auto a = eigvec_magnitude_ratio(vec({4, 1}), vec({1}), 0);
  CHECK(a.value == 1.0);
  CHECK(a.status == CellStatus::Determinate);
  const auto b = eigvec_magnitude_ratio(vec({1, -1}), vec({0}), 0);
  CHECK(b.value == 0.5);
  CHECK_THROWS_AS(eigvec_magnitude_ratio(vec({1, 1}), vec({1}), 0), GapError);
  CHECK_THROWS_AS(eigvec_magnitude_ratio(vec({4, 1}), vec({1, 1}), 0), std::invalid_argument);
  CHECK_THROWS_AS(eigvec_magnitude_ratio(vec({4, 1}), vec({1}), 2), std::out_of_range);
}

TEST_CASE("eigvec_magnitude_ratio matches eigenvector oracles on a random Hermitian matrix") {
  Rng rng(66);
  const auto m = random_hermitian<double>(6, rng);
  const auto full = hermitian_eigen(m);
  const RealMatrix<double> ref = test::reference_eigen_grid(m.matrix());
  const RealMatrix<double> jac = full.vectors.cwiseAbs2().transpose();
  for (Index j = 0; j < 6; ++j) {
    const auto minor = hermitian_eigen(delete_row_col(m, j)).eigenvalues;
    for (Index i = 0; i < 6; ++i) {
      const auto c = eigvec_magnitude_ratio(full.eigenvalues, minor, i);
      CHECK(std::abs(c.value - ref(i, j)) <= 1e-9);
      CHECK(std::abs(c.value - jac(i, j)) <= 1e-9);
    }
  }
}

TEST_CASE("eigvec_identity_products examples") {
  const auto z = eigvec_identity_products(vec({1, 1}), vec({1}), 0);
  CHECK(z.lhs_coefficient.is_zero());
  CHECK(z.rhs.is_zero());
  const auto d = eigvec_identity_products(vec({4, 1}), vec({1}), 0);
  CHECK(d.lhs_coefficient.to_real() == 3.0);
  CHECK(d.rhs.to_real() == 3.0);
  CHECK_THROWS_AS(eigvec_identity_products(vec({4, 1}), vec({}), 0), std::invalid_argument);
}

TEST_CASE("eigvec_identity_products vanish on a forced double eigenvalue") {
  Rng rng(13);
  const auto m = hermitian_with_eigenvalues<double>({3, 1, 1, -2, 0.5}, rng);
  const auto full = hermitian_eigen(m).eigenvalues;
  const double scale = 3.0;
  for (Index j = 0; j < 5; ++j) {
    const auto minor = hermitian_eigen(delete_row_col(m, j)).eigenvalues;
    for (Index i : {Index{1}, Index{2}}) {
      const auto s = eigvec_identity_products(full, minor, i);
      CHECK(std::abs(s.rhs.to_real()) <= 1e-10 * std::pow(scale, 4));
    }
  }
}

TEST_CASE("left_cell_products examples") {
  // m = 1: both products are empty.
  const auto one = left_cell_products(vec({1}), vec({}), 0);
  CHECK(one.lhs_coefficient.to_real() == 1.0);
  CHECK(one.rhs.to_real() == 1.0);

  // diag(2,1) without row 1 is [0 1], sigma = 1.
  const auto d = left_cell_products(vec({2, 1}), vec({1}), 0);
  CHECK(d.lhs_coefficient.to_real() == 3.0);
  CHECK(d.rhs.to_real() == 3.0);
  CHECK_THROWS_AS(left_cell_products(vec({2, 1}), vec({1, 0}), 0), std::invalid_argument);
}

TEST_CASE("left_cell_products on a constructed repeated spectrum") {
  Rng rng(321);
  const auto a = matrix_with_spectrum<double>(4, 4, {3, 2, 2, 1}, rng);
  const auto sv = singular_values_padded(a, 4);
  const RealMatrix<double> ref = test::reference_left_grid(a.matrix());
  const double norm = std::pow(3.0, 2 * 3);
  for (Index j = 0; j < 4; ++j) {
    const auto del = singular_values_padded(delete_row(a, j), 3);
    for (Index i = 0; i < 4; ++i) {
      const auto s = left_cell_products(sv, del, i);
      if (i == 1 || i == 2) CHECK(std::abs(s.rhs.to_real()) <= 1e-10 * norm);
      CHECK(std::abs(s.lhs_coefficient.to_real() * ref(i, j) - s.rhs.to_real()) <= 1e-10 * norm);
    }
  }
}

TEST_CASE("right_cell_products examples") {
  // A = [1 0]: sigma^2(A) padded = [1, 0].
  const auto a = right_cell_products(vec({1, 0}), vec({0}), 0);  // A without column 1 = [0]
  CHECK(a.lhs_coefficient.to_real() == 1.0);
  CHECK(a.rhs.to_real() == 1.0);
  const auto b = right_cell_products(vec({1, 0}), vec({1}), 0);  // A without column 2 = [1]
  CHECK(b.rhs.to_real() == 0.0);
}

TEST_CASE("right products against the oracle on a random 3x5 matrix") {
  Rng rng(35);
  const auto a = random_matrix<double>(3, 5, rng);
  const auto sv = singular_values_padded(a, 5);
  const RealMatrix<double> ref = test::reference_right_grid(a.matrix());
  IdentityOptions opts;
  for (Index s = 0; s < 5; ++s) {
    const auto del = singular_values_padded(delete_col(a, s), 4);
    for (Index l = 0; l < 3; ++l) {  // l = 4, 5 pair with the repeated zero
      const auto sides = right_cell_products(sv, del, l);
      CHECK(std::abs((sides.rhs / sides.lhs_coefficient).to_real() - ref(l, s)) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(right_cell_ratio(sv, singular_values_padded(delete_col(a, 0), 4), 0, opts), GapError);
}

TEST_CASE("left_cell_ratio and right_cell_ratio on diag(2,1)") {
  // A without row 2 = [2 0]: sigma^2 = 4.
  CHECK(left_cell_ratio(vec({2, 1}), vec({2}), 0).value == 0.0);
  const auto c = left_cell_ratio(vec({2, 1}), vec({2}), 1);
  CHECK(c.value == 1.0);
  CHECK(c.raw == 1.0);
  CHECK_FALSE(c.clamped);
  CHECK(right_cell_ratio(vec({2, 1}), vec({1}), 0).value == 1.0);
  CHECK_THROWS_AS(left_cell_ratio(vec({1, 1}), vec({1}), 0), GapError);
  CHECK_THROWS_AS(left_cell_ratio(vec({2, 1}), vec({2, 1}), 0), std::invalid_argument);
}

TEST_CASE("ratio forms reproduce the full grid for spectrum 1..8") {
  Rng rng(88);
  const auto a = matrix_with_spectrum<double>(8, 8, test::one_to(8), rng);
  const auto sv = singular_values_padded(a, 8);
  const RealMatrix<double> left = test::reference_left_grid(a.matrix());
  const RealMatrix<double> right = test::reference_right_grid(a.matrix());
  double worst = 0;
  for (Index j = 0; j < 8; ++j) {
    const auto rdel = singular_values_padded(delete_row(a, j), 7);
    const auto cdel = singular_values_padded(delete_col(a, j), 7);
    for (Index i = 0; i < 8; ++i) {
      worst = std::max(worst, std::abs(left_cell_ratio(sv, rdel, i).value - left(i, j)));
      worst = std::max(worst, std::abs(right_cell_ratio(sv, cdel, i).value - right(i, j)));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("clamping classification") {
  IdentityOptions opts;
  CellEstimate<double> c;
  detail::classify(c, -1e-9, opts.clamp_bound);
  CHECK(c.status == CellStatus::Clamped);
  CHECK(c.value == 0.0);
  CHECK(c.clamped);
  detail::classify(c, 1 + 1e-7, opts.clamp_bound);
  CHECK(c.status == CellStatus::Clamped);
  CHECK(c.value == 1.0);
  detail::classify(c, 1.5, opts.clamp_bound);
  CHECK(c.status == CellStatus::ConditioningFailure);
  CHECK(c.value == 1.0);
  detail::classify(c, 0.25, opts.clamp_bound);
  CHECK(c.status == CellStatus::Determinate);
  CHECK_FALSE(c.clamped);
}

TEST_CASE("recover on the identity is fully indeterminate") {
  const auto a = DenseMatrixd::identity(3);
  for (const auto& rec : {recover_left_magnitudes(a), recover_right_magnitudes(a)}) {
    CHECK(rec.magnitudes.indeterminate_count() == 9);
    CHECK_FALSE(rec.gaps.distinct);
    for (const auto& c : rec.magnitudes.cells) {
      CHECK(std::abs(c.sides.lhs_coefficient.to_real()) <= 1e-12);
      CHECK(std::abs(c.sides.rhs.to_real()) <= 1e-12);
    }
  }
}

TEST_CASE("recover on diag(2,1) gives the identity pattern") {
  const auto a = DenseMatrixd::diagonal({2, 1});
  for (const auto& rec : {recover_left_magnitudes(a), recover_right_magnitudes(a)}) {
    CHECK(rec.magnitudes.indeterminate_count() == 0);
    CHECK((rec.magnitudes.values() - RealMatrix<double>::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("recover on rectangular matrices against the oracle") {
  Rng rng(64);
  const auto tall = random_matrix<double>(6, 4, rng);
  const auto left = recover_left_magnitudes(tall);
  CHECK(max_cell_error(left.magnitudes, test::reference_left_grid(tall.matrix())) <= 1e-8);
  CHECK(left.magnitudes.indeterminate_count() == 12);  // two zero singular values share rows 5, 6
  const auto right = recover_right_magnitudes(tall);
  CHECK(right.magnitudes.indeterminate_count() == 0);
  CHECK(max_cell_error(right.magnitudes, test::reference_right_grid(tall.matrix())) <= 1e-8);

  const auto wide = random_matrix<double>(4, 6, rng);
  const auto wl = recover_left_magnitudes(wide);
  CHECK(wl.magnitudes.indeterminate_count() == 0);
  CHECK(max_cell_error(wl.magnitudes, test::reference_left_grid(wide.matrix())) <= 1e-8);
  const auto wr = recover_right_magnitudes(wide);
  CHECK(wr.magnitudes.indeterminate_count() == 12);
  CHECK(max_cell_error(wr.magnitudes, test::reference_right_grid(wide.matrix())) <= 1e-8);
}

TEST_CASE("single row and single column matrices") {
  const auto row = DenseMatrixd::from_rows({{1, 0}});
  const auto l = recover_left_magnitudes(row);
  CHECK(l.magnitudes.dim == 1);
  CHECK(l.magnitudes.cell(0, 0).value == 1.0);
  const auto r = recover_right_magnitudes(row);
  CHECK(r.magnitudes.cell(0, 0).value == 1.0);
  CHECK(r.magnitudes.cell(0, 1).value == 0.0);
  CHECK(r.magnitudes.cell(1, 0).value == 0.0);
  CHECK(r.magnitudes.cell(1, 1).value == 1.0);
}

TEST_CASE("recover_eigvec_magnitudes") {
  const auto x = recover_eigvec_magnitudes(HermitianMatrixd::from_rows({{0, 1}, {1, 0}}));
  for (const auto& c : x.magnitudes.cells) CHECK(c.value == doctest::Approx(0.5).epsilon(1e-15));
  const auto d = recover_eigvec_magnitudes(HermitianMatrixd::from_rows({{4, 0}, {0, 1}}));
  CHECK(d.magnitudes.values() == RealMatrix<double>::Identity(2, 2));
  const auto one = recover_eigvec_magnitudes(HermitianMatrixd::from_rows({{7}}));
  CHECK(one.magnitudes.cell(0, 0).value == 1.0);
}

// ---------------------------------------------------------------------------
// Invariants

TEST_CASE("oracle equivalence and normalization on well-gapped random matrices") {
  Rng rng(1001);
  for (int trial = 0; trial < 30; ++trial) {
    const Index m = 1 + static_cast<Index>(rng() % 9);
    const Index n = 1 + static_cast<Index>(rng() % 9);
    const auto a = random_matrix<double>(m, n, rng);
    for (Side side : {Side::Left, Side::Right}) {
      const auto rec = side == Side::Left ? recover_left_magnitudes(a) : recover_right_magnitudes(a);
      const auto ref = side == Side::Left ? test::reference_left_grid(a.matrix()) : test::reference_right_grid(a.matrix());
      for (Index i = 0; i < rec.magnitudes.dim; ++i)
        for (Index j = 0; j < rec.magnitudes.dim; ++j) {
          const auto& c = rec.magnitudes.cell(i, j);
          if (!c.determinate()) continue;
          CHECK(std::abs(c.value - ref(i, j)) <= 1e-8 + c.cond_score * 1e-12);
          CHECK(c.raw >= -1e-8 * (1 + c.cond_score));
        }
      if (rec.gaps.min_rel_gap >= 1e-6) {
        const RealVector<double> sums = rec.magnitudes.values().rowwise().sum();
        CHECK((sums.array() - 1.0).abs().maxCoeff() <= 1e-8 * static_cast<double>(rec.magnitudes.dim));
      }
    }
  }
}

TEST_CASE("scale invariance") {
  Rng rng(7);
  const auto a = matrix_with_spectrum<double>(5, 4, {4, 3, 2, 1}, rng);
  const auto base = recover_left_magnitudes(a);
  for (double c : {1e-6, 3.0, 1e6}) {
    const DenseMatrixd scaled(ComplexMatrix<double>(c * a.matrix()));
    CHECK(max_value_diff(base.magnitudes, recover_left_magnitudes(scaled).magnitudes) <= 1e-10);
  }
}

TEST_CASE("unitary invariance") {
  Rng rng(8);
  const auto a = matrix_with_spectrum<double>(4, 5, {5, 3, 2, 1}, rng);
  const auto w = random_unitary<double>(5, rng);
  const DenseMatrixd aw(ComplexMatrix<double>(a.matrix() * w));
  CHECK(max_value_diff(recover_left_magnitudes(a).magnitudes, recover_left_magnitudes(aw).magnitudes) <= 1e-9);

  const auto q = random_unitary<double>(4, rng);
  const DenseMatrixd qa(ComplexMatrix<double>(q * a.matrix()));
  CHECK(max_value_diff(recover_right_magnitudes(a).magnitudes, recover_right_magnitudes(qa).magnitudes) <= 1e-9);
}

TEST_CASE("row permutation permutes the component index") {
  Rng rng(10);
  const auto a = matrix_with_spectrum<double>(5, 5, test::one_to(5), rng);
  std::vector<Index> perm{3, 0, 4, 1, 2};
  ComplexMatrix<double> p(5, 5);
  for (Index r = 0; r < 5; ++r) p.row(r) = a.matrix().row(perm[static_cast<std::size_t>(r)]);
  const auto base = recover_left_magnitudes(a).magnitudes;
  const auto permuted = recover_left_magnitudes(DenseMatrixd(p)).magnitudes;
  for (Index i = 0; i < 5; ++i)
    for (Index r = 0; r < 5; ++r)
      CHECK(std::abs(permuted.cell(i, r).value - base.cell(i, perm[static_cast<std::size_t>(r)]).value) <= 1e-9);
}

TEST_CASE("degenerate rows keep vanishing right-hand sides") {
  Rng rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = matrix_with_spectrum<double>(5, 5, {4, 2, 2, 2, 1}, rng);
    const auto rec = recover_left_magnitudes(a);
    const double norm = std::pow(rec.spectrum(0), 2 * 4);
    for (Index i = 1; i <= 3; ++i)
      for (Index j = 0; j < 5; ++j) {
        CHECK_FALSE(rec.magnitudes.cell(i, j).determinate());
        CHECK(std::abs(rec.magnitudes.cell(i, j).sides.rhs.to_real()) <= 1e-10 * norm);
      }
    // Rows with a simple singular value are still determined.
    CHECK(rec.magnitudes.cell(0, 0).determinate());
    CHECK(rec.magnitudes.cell(4, 0).determinate());
  }
}

TEST_CASE("results do not depend on the worker count") {
  Rng rng(15);
  const auto a = random_matrix<double>(9, 7, rng);
  IdentityOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto x = recover_left_magnitudes(a, one).magnitudes;
  const auto y = recover_left_magnitudes(a, many).magnitudes;
  for (std::size_t k = 0; k < x.cells.size(); ++k) {
    CHECK(x.cells[k].value == y.cells[k].value);
    CHECK(std::memcmp(&x.cells[k].raw, &y.cells[k].raw, sizeof(double)) == 0);
  }
}
