#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "log_real.hpp"

namespace pshsym {

/// Node kinds of the closed-form expression language. Coordinates are
/// 1-based complex indices; a point of C^n is passed as 2n interleaved reals
/// (re_1, im_1, ..., re_n, im_n).
enum class ExprOp { Const, AbsCoord, Norm, Re, Im, Log, Max, Sum, Product, Pow };

struct Expr {
  ExprOp op = ExprOp::Const;
  double value = 0.0;  // Const value, or Pow exponent
  int index = 0;       // 0-based coordinate for AbsCoord / Re / Im
  std::vector<Expr> args;
};

Expr parse_expression(const nlohmann::json& j, int dimension);
nlohmann::json to_json(const Expr& e);

/// True when the expression reads z only through |z_1|, ..., |z_n| or |z|,
/// i.e. it is toric by construction.
bool depends_only_on_moduli(const Expr& e);
/// True when the expression reads z only through |z|.
bool depends_only_on_norm(const Expr& e);

namespace detail {
inline double max_of(double a, double b) { return a < b ? b : a; }
inline LogReal max_of(LogReal a, LogReal b) { return max(a, b); }
inline double hypot_of(double a, double b) { return std::hypot(a, b); }
inline LogReal hypot_of(LogReal a, LogReal b) { return hypot(a, b); }
inline double make_const(double v, double) { return v; }
inline LogReal make_const(double v, LogReal) { return LogReal::from_double(v); }
inline double log_of(double a) { return std::log(a); }
inline LogReal log_of(LogReal a) { return log(a); }
inline double pow_of(double a, double c) { return std::pow(a, c); }
inline LogReal pow_of(LogReal a, double c) { return pow(a, c); }
}  // namespace detail

/// Evaluates e at the point with interleaved coordinates. Scalar is double
/// (fast path) or LogReal (arbitrary depth).
template <class Scalar>
Scalar evaluate_expr(const Expr& e, std::span<const Scalar> coords) {
  using detail::make_const;
  switch (e.op) {
    case ExprOp::Const: return make_const(e.value, Scalar{});
    case ExprOp::AbsCoord: return detail::hypot_of(coords[2 * e.index], coords[2 * e.index + 1]);
    case ExprOp::Norm: {
      Scalar acc = coords[0];
      acc = detail::hypot_of(acc, coords[1]);
      for (std::size_t i = 2; i < coords.size(); ++i) acc = detail::hypot_of(acc, coords[i]);
      return acc;
    }
    case ExprOp::Re: return coords[2 * e.index];
    case ExprOp::Im: return coords[2 * e.index + 1];
    case ExprOp::Log: return detail::log_of(evaluate_expr(e.args[0], coords));
    case ExprOp::Max: {
      Scalar acc = evaluate_expr(e.args[0], coords);
      for (std::size_t i = 1; i < e.args.size(); ++i) acc = detail::max_of(acc, evaluate_expr(e.args[i], coords));
      return acc;
    }
    case ExprOp::Sum: {
      Scalar acc = evaluate_expr(e.args[0], coords);
      for (std::size_t i = 1; i < e.args.size(); ++i) acc = acc + evaluate_expr(e.args[i], coords);
      return acc;
    }
    case ExprOp::Product: {
      Scalar acc = evaluate_expr(e.args[0], coords);
      for (std::size_t i = 1; i < e.args.size(); ++i) acc = acc * evaluate_expr(e.args[i], coords);
      return acc;
    }
    case ExprOp::Pow: return detail::pow_of(evaluate_expr(e.args[0], coords), e.value);
  }
  return make_const(std::nan(""), Scalar{});
}

}  // namespace pshsym
