#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace pshsym {

/// Real number stored as sign and natural log of its magnitude. Used for
/// evaluating profiles where |z_k| = e^{x_k} with x_k far below the double
/// exponent range (the asymptotic windows reach x ~ -1e8).
struct LogReal {
  int sign = 0;                                             // -1, 0, +1
  double logmag = -std::numeric_limits<double>::infinity();  // log|x|

  static LogReal zero() { return {}; }
  static LogReal from_log(double logmag, int sign = 1) {
    if (logmag == -std::numeric_limits<double>::infinity()) return {};
    return {sign, logmag};
  }
  static LogReal from_double(double v) {
    if (v == 0.0) return {};
    return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
  }

  double to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(logmag);
  }
  bool is_nan() const { return std::isnan(logmag); }
};

namespace detail {
inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a == std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}
}  // namespace detail

inline LogReal operator-(LogReal a) { return {-a.sign, a.logmag}; }

inline LogReal operator+(LogReal a, LogReal b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.sign == b.sign) return {a.sign, detail::log_add_exp(a.logmag, b.logmag)};
  if (a.logmag < b.logmag) std::swap(a, b);
  if (a.logmag == b.logmag) {
    if (std::isinf(a.logmag)) return {1, std::numeric_limits<double>::quiet_NaN()};
    return {};
  }
  if (std::isinf(a.logmag)) return a;
  return {a.sign, a.logmag + std::log1p(-std::exp(b.logmag - a.logmag))};
}

inline LogReal operator*(LogReal a, LogReal b) {
  const bool a_inf = a.logmag == std::numeric_limits<double>::infinity();
  const bool b_inf = b.logmag == std::numeric_limits<double>::infinity();
  if ((a.sign == 0 && b_inf) || (b.sign == 0 && a_inf))
    return {1, std::numeric_limits<double>::quiet_NaN()};
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.logmag + b.logmag};
}

inline bool operator<(LogReal a, LogReal b) {
  if (a.sign != b.sign) return a.sign < b.sign;
  if (a.sign == 0) return false;
  return a.sign > 0 ? a.logmag < b.logmag : a.logmag > b.logmag;
}

/// Natural logarithm, returned as an ordinary real wrapped back into LogReal.
inline LogReal log(LogReal a) {
  if (a.sign < 0) return {1, std::numeric_limits<double>::quiet_NaN()};
  if (a.sign == 0) return {-1, std::numeric_limits<double>::infinity()};
  if (a.logmag == std::numeric_limits<double>::infinity()) return a;
  return LogReal::from_double(a.logmag);
}

inline LogReal pow(LogReal a, double c) {
  if (a.sign == 0) {
    if (c > 0) return {};
    if (c == 0) return {1, 0.0};
    return {1, std::numeric_limits<double>::infinity()};
  }
  int sign = 1;
  if (a.sign < 0) {
    if (std::floor(c) != c) return {1, std::numeric_limits<double>::quiet_NaN()};
    sign = (std::fmod(std::fabs(c), 2.0) == 1.0) ? -1 : 1;
  }
  if (c == 0) return {1, 0.0};
  return {sign, a.logmag * c};
}

inline LogReal max(LogReal a, LogReal b) { return (a < b) ? b : a; }

/// sqrt(a^2 + b^2) without leaving log space.
inline LogReal hypot(LogReal a, LogReal b) {
  return LogReal::from_log(0.5 * detail::log_add_exp(2.0 * a.logmag, 2.0 * b.logmag));
}

}  // namespace pshsym
