#pragma once

#include <cmath>
#include <span>

#include <json.hpp>

namespace pshsym {

/// Doubles as JSON: infinities become the strings "-inf" / "inf", NaN "nan".
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

inline nlohmann::json json_array(std::span<const double> v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

}  // namespace pshsym
