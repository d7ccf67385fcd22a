#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "proxweb/core/error.hpp"
#include "proxweb/core/geometry.hpp"
#include "proxweb/core/mac.hpp"
#include "proxweb/core/time.hpp"

// Small helpers for decoding structured-text bodies into domain types with
// field-path diagnostics.
namespace proxweb::json_fields {

using json = nlohmann::ordered_json;

[[noreturn]] inline void shape_error(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::BadRequest, path + ": " + why, path);
}

inline const json& require(const json& obj, const char* key, const std::string& path = {}) {
  if (!obj.is_object()) shape_error(path.empty() ? "$" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) shape_error(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline const json* optional_field(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) shape_error(path, "expected a string");
  return v.get<std::string>();
}

inline std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) shape_error(path, "expected an integer");
  return v.get<std::int64_t>();
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) shape_error(path, "expected a number");
  return v.get<double>();
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) shape_error(path, "expected a boolean");
  return v.get<bool>();
}

inline MacAddress as_mac(const json& v, const std::string& path) {
  return MacAddress::parse(as_string(v, path));
}

inline Timestamp as_timestamp(const json& v, const std::string& path) {
  if (v.is_number_integer()) return from_epoch_seconds(v.get<std::int64_t>());
  return parse_rfc3339(as_string(v, path));
}

inline Point as_point(const json& v, const std::string& path) {
  if (v.is_array() && v.size() == 2) {
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
  }
  return {as_number(require(v, "x", path), path + ".x"),
          as_number(require(v, "y", path), path + ".y")};
}

inline json point_json(Point p) { return json{{"x", p.x}, {"y", p.y}}; }

}  // namespace proxweb::json_fields
