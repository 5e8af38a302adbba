#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace specvec {

/// A real number held as sign * mantissa * 2^exponent with mantissa in
/// [0.5, 1). Products of hundreds of small or large factors neither
/// underflow nor overflow, and each multiplication rounds exactly once.
template <typename Real>
class SignedLogValue {
 public:
  SignedLogValue() = default;  // zero

  explicit SignedLogValue(Real x) {
    if (x == Real(0)) return;
    sign_ = x > 0 ? 1 : -1;
    int e = 0;
    mantissa_ = std::frexp(std::abs(x), &e);
    exponent_ = e;
  }

  static SignedLogValue one() { return SignedLogValue(Real(1)); }

  int sign() const noexcept { return sign_; }
  bool is_zero() const noexcept { return sign_ == 0; }

  /// Natural log of the magnitude; -inf for zero.
  Real log_magnitude() const {
    if (sign_ == 0) return -std::numeric_limits<Real>::infinity();
    return std::log(mantissa_) + static_cast<Real>(exponent_) * std::numbers::ln2_v<Real>;
  }

  /// Exact binary exponent of the magnitude (frexp convention).
  std::int64_t exponent() const noexcept { return exponent_; }
  Real mantissa() const noexcept { return mantissa_; }

  /// Back to an ordinary float; saturates to 0 or inf outside the range.
  Real to_real() const {
    if (sign_ == 0) return Real(0);
    constexpr std::int64_t lo = std::numeric_limits<Real>::min_exponent - std::numeric_limits<Real>::digits - 2;
    constexpr std::int64_t hi = std::numeric_limits<Real>::max_exponent + 2;
    const std::int64_t e = std::clamp(exponent_, lo, hi);
    return static_cast<Real>(sign_) * std::ldexp(mantissa_, static_cast<int>(e));
  }

  /// Value scaled by 2^-shift, i.e. to_real() / 2^shift without intermediate overflow.
  Real to_real_scaled(std::int64_t shift) const {
    SignedLogValue t = *this;
    t.exponent_ -= shift;
    return t.to_real();
  }

  SignedLogValue& operator*=(const SignedLogValue& o) {
    if (sign_ == 0 || o.sign_ == 0) {
      *this = SignedLogValue();
      return *this;
    }
    sign_ *= o.sign_;
    int e = 0;
    mantissa_ = std::frexp(mantissa_ * o.mantissa_, &e);
    exponent_ += o.exponent_ + e;
    return *this;
  }

  friend SignedLogValue operator*(SignedLogValue a, const SignedLogValue& b) { return a *= b; }

  /// a / b; b must be nonzero.
  friend SignedLogValue operator/(const SignedLogValue& a, const SignedLogValue& b) {
    if (b.sign_ == 0) throw std::domain_error("SignedLogValue: division by zero");
    if (a.sign_ == 0) return SignedLogValue();
    SignedLogValue r;
    r.sign_ = a.sign_ * b.sign_;
    int e = 0;
    r.mantissa_ = std::frexp(a.mantissa_ / b.mantissa_, &e);
    r.exponent_ = a.exponent_ - b.exponent_ + e;
    return r;
  }

 private:
  int sign_ = 0;
  Real mantissa_ = 0;
  std::int64_t exponent_ = 0;
};

/// Product of the given terms, multiplied in descending-magnitude order
/// (stable on ties). The empty product is +1.
template <typename Real>
SignedLogValue<Real> signed_product(std::span<const Real> terms) {
  std::vector<Real> sorted(terms.begin(), terms.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](Real a, Real b) { return std::abs(a) > std::abs(b); });
  auto acc = SignedLogValue<Real>::one();
  for (Real t : sorted) {
    if (t == Real(0)) return SignedLogValue<Real>();
    acc *= SignedLogValue<Real>(t);
  }
  return acc;
}

}  // namespace specvec
