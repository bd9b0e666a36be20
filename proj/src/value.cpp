#include "noisynth/value.hpp"

#include "noisynth/errors.hpp"

namespace noisynth {

std::string type_name(ValueType t) {
  switch (t) {
    case ValueType::Int:
      return "int";
    case ValueType::Bool:
      return "bool";
    case ValueType::Str:
      return "str";
  }
  return "?";
}

std::string Value::repr() const {
  if (is_int()) return std::to_string(as_int());
  if (is_bool()) return as_bool() ? "true" : "false";
  return nlohmann::json(as_str()).dump();
}

Value Value::from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer() || j.is_number_unsigned()) {
    return Value(j.get<int64_t>());
  }
  if (j.is_string()) return Value(j.get<std::string>());
  throw ConfigError("value must be an integer, boolean, or string, got: " +
                    j.dump());
}

nlohmann::json Value::to_json() const {
  if (is_int()) return as_int();
  if (is_bool()) return as_bool();
  return as_str();
}

std::string repr(const std::vector<Value>& values) {
  std::string out = "[";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += values[i].repr();
  }
  out += "]";
  return out;
}

size_t hash_value(const Value& v) {
  size_t tag = static_cast<size_t>(v.type());
  size_t h;
  if (v.is_int()) {
    h = std::hash<int64_t>{}(v.as_int());
  } else if (v.is_bool()) {
    h = std::hash<bool>{}(v.as_bool());
  } else {
    h = std::hash<std::string>{}(v.as_str());
  }
  return h ^ (tag + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

size_t hash_values(const std::vector<Value>& values) {
  size_t h = 0xcbf29ce484222325ull;
  for (const Value& v : values) {
    h ^= hash_value(v);
    h *= 0x100000001b3ull;
  }
  return h;
}

InputEnv env_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("input environment must be a JSON object");
  }
  InputEnv env;
  for (auto it = j.begin(); it != j.end(); ++it) {
    env.emplace(it.key(), Value::from_json(it.value()));
  }
  return env;
}

nlohmann::json env_to_json(const InputEnv& env) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : env) j[name] = value.to_json();
  return j;
}

std::vector<Value> values_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("value vector must be a JSON array");
  std::vector<Value> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(Value::from_json(e));
  return out;
}

nlohmann::json values_to_json(const std::vector<Value>& values) {
  nlohmann::json j = nlohmann::json::array();
  for (const Value& v : values) j.push_back(v.to_json());
  return j;
}

}  // namespace noisynth
