#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>

#include <json.hpp>

#include "hydrosim/errors.hpp"

namespace hydrosim::detail {

using Json = nlohmann::json;

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(what + ": " + e.what(), static_cast<long>(e.byte));
  }
}

inline void reject_unknown_keys(const Json& object, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError(where + ": unknown key \"" + it.key() + "\"");
    }
  }
}

inline const Json& require(const Json& object, const std::string& key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

inline std::int64_t as_int(const Json& value, const std::string& where) {
  if (!value.is_number_integer() && !value.is_number_unsigned()) {
    throw ParseError(where + ": expected an integer");
  }
  return value.get<std::int64_t>();
}

inline double as_number(const Json& value, const std::string& where) {
  if (!value.is_number()) {
    throw ParseError(where + ": expected a number");
  }
  double v = value.get<double>();
  if (!std::isfinite(v)) {
    throw ParseError(where + ": expected a finite number");
  }
  return v;
}

inline bool as_bool(const Json& value, const std::string& where) {
  if (!value.is_boolean()) {
    throw ParseError(where + ": expected a boolean");
  }
  return value.get<bool>();
}

inline std::string as_string(const Json& value, const std::string& where) {
  if (!value.is_string()) {
    throw ParseError(where + ": expected a string");
  }
  return value.get<std::string>();
}

}  // namespace hydrosim::detail
