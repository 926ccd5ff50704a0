#include "expression.hpp"

#include "error.hpp"

namespace pshsym {
namespace {

[[noreturn]] void schema(const std::string& what, const nlohmann::json& j) {
  throw Error(ErrorCode::SchemaError, what + " in expression " + j.dump());
}

double number(const nlohmann::json& j, const nlohmann::json& ctx) {
  if (!j.is_number()) schema("expected a number", ctx);
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema("non-finite constant", ctx);
  return v;
}

int coordinate(const nlohmann::json& j, int dimension) {
  if (j.size() != 2 || !j[1].is_number_integer()) schema("expected [op, k]", j);
  const int k = j[1].get<int>();
  if (k < 1 || k > dimension) schema("coordinate index out of range 1.." + std::to_string(dimension), j);
  return k - 1;
}

Expr operand(const nlohmann::json& j, int dimension) {
  if (j.is_number()) return Expr{ExprOp::Const, number(j, j), 0, {}};
  return parse_expression(j, dimension);
}

}  // namespace

Expr parse_expression(const nlohmann::json& j, int dimension) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) schema("node must be [\"op\", ...]", j);
  const std::string op = j[0].get<std::string>();
  const std::size_t arity = j.size() - 1;

  if (op == "const") {
    if (arity != 1) schema("const takes one number", j);
    return Expr{ExprOp::Const, number(j[1], j), 0, {}};
  }
  if (op == "abs_coord") return Expr{ExprOp::AbsCoord, 0.0, coordinate(j, dimension), {}};
  if (op == "re") return Expr{ExprOp::Re, 0.0, coordinate(j, dimension), {}};
  if (op == "im") return Expr{ExprOp::Im, 0.0, coordinate(j, dimension), {}};
  if (op == "norm") {
    if (arity != 0) schema("norm takes no arguments", j);
    return Expr{ExprOp::Norm, 0.0, 0, {}};
  }
  if (op == "log") {
    if (arity != 1) schema("log takes one argument", j);
    return Expr{ExprOp::Log, 0.0, 0, {parse_expression(j[1], dimension)}};
  }
  if (op == "pow") {
    if (arity != 2) schema("pow takes [e, c]", j);
    return Expr{ExprOp::Pow, number(j[2], j), 0, {parse_expression(j[1], dimension)}};
  }
  if (op == "max" || op == "+" || op == "*") {
    if (arity < 2) schema(op + " needs at least two operands", j);
    Expr e{op == "max" ? ExprOp::Max : (op == "+" ? ExprOp::Sum : ExprOp::Product), 0.0, 0, {}};
    for (std::size_t i = 1; i < j.size(); ++i) e.args.push_back(operand(j[i], dimension));
    return e;
  }
  schema("unknown operator '" + op + "'", j);
}

nlohmann::json to_json(const Expr& e) {
  using nlohmann::json;
  switch (e.op) {
    case ExprOp::Const: return json::array({"const", e.value});
    case ExprOp::AbsCoord: return json::array({"abs_coord", e.index + 1});
    case ExprOp::Re: return json::array({"re", e.index + 1});
    case ExprOp::Im: return json::array({"im", e.index + 1});
    case ExprOp::Norm: return json::array({"norm"});
    case ExprOp::Log: return json::array({"log", to_json(e.args[0])});
    case ExprOp::Pow: return json::array({"pow", to_json(e.args[0]), e.value});
    case ExprOp::Max:
    case ExprOp::Sum:
    case ExprOp::Product: {
      json out = json::array({e.op == ExprOp::Max ? "max" : (e.op == ExprOp::Sum ? "+" : "*")});
      for (const auto& a : e.args) out.push_back(to_json(a));
      return out;
    }
  }
  return json();
}

bool depends_only_on_moduli(const Expr& e) {
  if (e.op == ExprOp::Re || e.op == ExprOp::Im) return false;
  for (const auto& a : e.args)
    if (!depends_only_on_moduli(a)) return false;
  return true;
}

bool depends_only_on_norm(const Expr& e) {
  if (e.op == ExprOp::Re || e.op == ExprOp::Im || e.op == ExprOp::AbsCoord) return false;
  for (const auto& a : e.args)
    if (!depends_only_on_norm(a)) return false;
  return true;
}

}  // namespace pshsym
