#pragma once

// Field accessors that turn JSON shape errors into ValidationErrors naming
// the offending field.

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fmvsense/error.hpp"

namespace fmv::detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] inline void field_error(std::string_view field, std::string_view what) {
  throw ValidationError("field '" + std::string(field) + "': " + std::string(what));
}

inline const json* find(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline const json& require(const json& obj, std::string_view key) {
  const json* v = find(obj, key);
  if (v == nullptr) field_error(key, "missing");
  return *v;
}

inline double as_number(const json& v, std::string_view field) {
  if (!v.is_number()) field_error(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(field, "expected a finite number");
  return d;
}

inline std::int64_t as_int(const json& v, std::string_view field) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  }
  field_error(field, "expected an integer");
}

inline std::uint64_t as_uint(const json& v, std::string_view field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t i = as_int(v, field);
  if (i < 0) field_error(field, "expected a non-negative integer");
  return static_cast<std::uint64_t>(i);
}

inline std::string as_string(const json& v, std::string_view field) {
  if (!v.is_string()) field_error(field, "expected a string");
  return v.get<std::string>();
}

inline bool as_bool(const json& v, std::string_view field) {
  if (!v.is_boolean()) field_error(field, "expected a boolean");
  return v.get<bool>();
}

inline const json& as_object(const json& v, std::string_view field) {
  if (!v.is_object()) field_error(field, "expected an object");
  return v;
}

inline const json& as_array(const json& v, std::string_view field, std::size_t size = 0) {
  if (!v.is_array()) field_error(field, "expected an array");
  if (size != 0 && v.size() != size) field_error(field, "expected " + std::to_string(size) + " elements");
  return v;
}

inline double number_or(const json& obj, std::string_view key, double fallback) {
  const json* v = find(obj, key);
  return v ? as_number(*v, key) : fallback;
}

/// Rejects keys outside `allowed`.
inline void only_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || k == a;
    if (!ok) throw ValidationError("unknown key '" + k + "' in " + std::string(where));
  }
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

}  // namespace fmv::detail
