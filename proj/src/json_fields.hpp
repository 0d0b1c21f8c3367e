#pragma once

// Typed field access for the JSON-based scene and scenario files. Errors name
// the offending key path.

#include <string>

#include "json.hpp"

#include "hess/error.hpp"
#include "hess/scene.hpp"

namespace hess::detail {

using nlohmann::json;

class FieldReader {
 public:
  explicit FieldReader(std::string who) : who_(std::move(who)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw ValidationError(who_ + ": " + path + ": " + message);
  }

  double number(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) fail(join(path, key), "missing required number");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
  }

  double number_or(const json& obj, const std::string& key, const std::string& path,
                   double fallback) const {
    return obj.contains(key) ? number(obj, key, path) : fallback;
  }

  std::string string(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) fail(join(path, key), "missing required string");
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(const json& obj, const std::string& key, const std::string& path,
                        const std::string& fallback) const {
    return obj.contains(key) ? string(obj, key, path) : fallback;
  }

  Vec3 vec3(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) fail(join(path, key), "missing required 3-vector");
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3) fail(join(path, key), "expected an array of 3 numbers");
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
      if (!v[a].is_number()) fail(join(path, key), "expected an array of 3 numbers");
      out[a] = v[a].get<double>();
    }
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::string who_;
};

// Parses JSON text (comments allowed), mapping syntax errors to ParseError
// with a 1-based line and column.
json parse_json_text(std::string_view text, const std::string& who);

}  // namespace hess::detail
