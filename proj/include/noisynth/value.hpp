#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace noisynth {

enum class ValueType { Int, Bool, Str };

std::string type_name(ValueType t);

// Runtime value: 64-bit signed integer, boolean, or UTF-8 string. Equality
// is structural and never crosses tags.
class Value {
 public:
  Value() : v_(int64_t{0}) {}
  explicit Value(int64_t i) : v_(i) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(std::string s) : v_(std::move(s)) {}

  ValueType type() const {
    return static_cast<ValueType>(v_.index());
  }
  bool is_int() const { return v_.index() == 0; }
  bool is_bool() const { return v_.index() == 1; }
  bool is_str() const { return v_.index() == 2; }
  int64_t as_int() const { return std::get<int64_t>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const std::string& as_str() const { return std::get<std::string>(v_); }

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  // Canonical rendering: 12, true, "ab" (strings JSON-escaped). Doubles as
  // the serialization used for deterministic ordering.
  std::string repr() const;

  static Value from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::variant<int64_t, bool, std::string> v_;
};

// Canonical serialization of a value vector, e.g. [1,"ab",true]. Output
// classes are ordered by this string wherever a deterministic tie-break is
// needed.
std::string repr(const std::vector<Value>& values);

size_t hash_value(const Value& v);
size_t hash_values(const std::vector<Value>& values);

// Input binding: variable name -> value.
using InputEnv = std::map<std::string, Value>;

InputEnv env_from_json(const nlohmann::json& j);
nlohmann::json env_to_json(const InputEnv& env);

std::vector<Value> values_from_json(const nlohmann::json& j);
nlohmann::json values_to_json(const std::vector<Value>& values);

}  // namespace noisynth
