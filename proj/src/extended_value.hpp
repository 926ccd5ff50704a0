#pragma once

#include <cmath>
#include <compare>
#include <limits>

#include "error.hpp"

namespace pshsym {

/// A real number or the distinguished value -infinity. This is the codomain
/// of every plurisubharmonic evaluation; +infinity and NaN are rejected.
class ExtendedValue {
 public:
  constexpr ExtendedValue() = default;
  explicit ExtendedValue(double v) : v_(v) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::InvalidArgument, "extended value must be real or -inf");
  }

  static ExtendedValue neg_infinity() {
    return ExtendedValue(-std::numeric_limits<double>::infinity());
  }

  bool is_neg_infinity() const { return std::isinf(v_); }
  /// Underlying IEEE value; -inf for NEG_INFINITY.
  double value() const { return v_; }

  friend ExtendedValue operator+(ExtendedValue a, double r) { return ExtendedValue(a.v_ + r); }
  friend ExtendedValue operator+(double r, ExtendedValue a) { return a + r; }
  friend ExtendedValue operator-(ExtendedValue a, double r) { return ExtendedValue(a.v_ - r); }

  friend bool operator==(ExtendedValue a, ExtendedValue b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(ExtendedValue a, ExtendedValue b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

}  // namespace pshsym
