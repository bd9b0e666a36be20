#include "noisynth/noise.hpp"

#include <algorithm>
#include <map>

#include "noisynth/errors.hpp"
#include "noisynth/unicode.hpp"

namespace noisynth {

namespace {

void require_probability(double p, const std::string& what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError(what + " must lie strictly inside (0, 1), got " +
                      std::to_string(p));
  }
}

const std::string& require_str(const Value& v) {
  if (!v.is_str()) {
    throw std::runtime_error("string noise applied to non-string value " +
                             v.repr());
  }
  return v.as_str();
}

}  // namespace

NoiseModel NoiseModel::identity() { return NoiseModel(); }

NoiseModel NoiseModel::n_substitution(std::vector<double> delta,
                                      const std::string& alphabet_utf8) {
  NoiseModel m;
  m.kind_ = Kind::NSub;
  if (delta.empty()) throw ConfigError("n_substitution requires a delta");
  for (double d : delta) require_probability(d, "n_substitution delta");
  m.delta_ = std::move(delta);
  m.alphabet_ = utf8_decode(alphabet_utf8);
  if (m.alphabet_.size() < 2) {
    throw ConfigError("n_substitution alphabet needs at least 2 characters");
  }
  std::u32string sorted = m.alphabet_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("n_substitution alphabet has repeated characters");
  }
  return m;
}

NoiseModel NoiseModel::n_substitution(double delta,
                                      const std::string& alphabet) {
  return n_substitution(std::vector<double>{delta}, alphabet);
}

NoiseModel NoiseModel::one_delete(double delta) {
  require_probability(delta, "one_delete delta");
  NoiseModel m;
  m.kind_ = Kind::OneDelete;
  m.delete_delta_ = delta;
  return m;
}

NoiseModel NoiseModel::first_char_delete() {
  NoiseModel m;
  m.kind_ = Kind::FirstCharDelete;
  return m;
}

NoiseModel NoiseModel::mixture(
    std::vector<std::pair<NoiseModel, double>> parts) {
  if (parts.empty()) throw ConfigError("mixture requires components");
  double total = 0;
  for (const auto& [model, w] : parts) {
    if (!(w > 0)) throw ConfigError("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("mixture weights must sum to 1, got " +
                      std::to_string(total));
  }
  NoiseModel m;
  m.kind_ = Kind::Mixture;
  m.components_ = std::move(parts);
  return m;
}

NoiseModel NoiseModel::from_json(const nlohmann::json& j) {
  std::string kind = j.is_string() ? j.get<std::string>()
                                   : j.at("kind").get<std::string>();
  if (kind == "identity") return identity();
  if (kind == "n_substitution") {
    std::vector<double> delta;
    if (j.at("delta").is_array()) {
      delta = j["delta"].get<std::vector<double>>();
    } else {
      delta.push_back(j["delta"].get<double>());
    }
    return n_substitution(std::move(delta),
                          j.value("alphabet", std::string(
                                      "abcdefghijklmnopqrstuvwxyz")));
  }
  if (kind == "one_delete") return one_delete(j.at("delta").get<double>());
  if (kind == "first_char_delete") return first_char_delete();
  if (kind == "mixture") {
    std::vector<std::pair<NoiseModel, double>> parts;
    for (const auto& c : j.at("components")) {
      parts.emplace_back(from_json(c.at("model")),
                         c.at("weight").get<double>());
    }
    return mixture(std::move(parts));
  }
  throw ConfigError("unknown noise kind: " + kind);
}

nlohmann::json NoiseModel::to_json() const {
  switch (kind_) {
    case Kind::Identity:
      return {{"kind", "identity"}};
    case Kind::NSub: {
      nlohmann::json j{{"kind", "n_substitution"},
                       {"alphabet", utf8_encode(alphabet_)}};
      if (delta_.size() == 1) {
        j["delta"] = delta_[0];
      } else {
        j["delta"] = delta_;
      }
      return j;
    }
    case Kind::OneDelete:
      return {{"kind", "one_delete"}, {"delta", delete_delta_}};
    case Kind::FirstCharDelete:
      return {{"kind", "first_char_delete"}};
    case Kind::Mixture: {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& [model, w] : components_) {
        parts.push_back({{"weight", w}, {"model", model.to_json()}});
      }
      return {{"kind", "mixture"}, {"components", parts}};
    }
  }
  return {};
}

std::string NoiseModel::describe() const { return to_json().dump(); }

double NoiseModel::delta_at(size_t pos, size_t len) const {
  if (delta_.size() == 1) return delta_[0];
  if (pos >= delta_.size()) {
    throw ConfigError("n_substitution delta vector has " +
                      std::to_string(delta_.size()) +
                      " entries, string position " + std::to_string(pos) +
                      " requested (string length " + std::to_string(len) + ")");
  }
  return delta_[pos];
}

Value NoiseModel::corrupt_one(const Value& z, Rng& rng) const {
  switch (kind_) {
    case Kind::Identity:
      return z;
    case Kind::NSub: {
      std::u32string s = utf8_decode(require_str(z));
      for (size_t i = 0; i < s.size(); ++i) {
        if (!rng.bernoulli(delta_at(i, s.size()))) continue;
        std::u32string choices;
        for (char32_t c : alphabet_) {
          if (c != s[i]) choices.push_back(c);
        }
        if (choices.empty()) continue;  // nothing to substitute with
        s[i] = choices[rng.uniform_below(choices.size())];
      }
      return Value(utf8_encode(s));
    }
    case Kind::OneDelete: {
      std::u32string s = utf8_decode(require_str(z));
      // Empty strings have no deletable position and pass through.
      if (s.empty() || !rng.bernoulli(delete_delta_)) {
        return Value(utf8_encode(s));
      }
      size_t pos = rng.uniform_below(s.size());
      s.erase(s.begin() + pos);
      return Value(utf8_encode(s));
    }
    case Kind::FirstCharDelete: {
      std::u32string s = utf8_decode(require_str(z));
      if (!s.empty()) s.erase(s.begin());
      return Value(utf8_encode(s));
    }
    case Kind::Mixture:
      throw std::logic_error("mixture handled at vector level");
  }
  return z;
}

std::vector<Value> NoiseModel::corrupt(const std::vector<Value>& z,
                                       Rng& rng) const {
  if (kind_ == Kind::Mixture) {
    double u = rng.uniform();
    double acc = 0;
    for (const auto& [model, w] : components_) {
      acc += w;
      if (u < acc) return model.corrupt(z, rng);
    }
    return components_.back().first.corrupt(z, rng);
  }
  std::vector<Value> y;
  y.reserve(z.size());
  for (const Value& v : z) y.push_back(corrupt_one(v, rng));
  return y;
}

LogReal NoiseModel::pmf_one(const Value& y, const Value& z) const {
  switch (kind_) {
    case Kind::Identity:
      return y == z ? LogReal::one() : LogReal::zero();
    case Kind::NSub: {
      std::u32string ys = utf8_decode(require_str(y));
      std::u32string zs = utf8_decode(require_str(z));
      if (ys.size() != zs.size()) return LogReal::zero();
      LogReal p = LogReal::one();
      for (size_t i = 0; i < zs.size(); ++i) {
        double delta = delta_at(i, zs.size());
        if (ys[i] == zs[i]) {
          p *= LogReal::from_linear(1.0 - delta);
          continue;
        }
        size_t choices = alphabet_.size();
        for (char32_t c : alphabet_) {
          if (c == zs[i]) --choices;
        }
        bool in_alphabet = false;
        for (char32_t c : alphabet_) {
          if (c == ys[i]) in_alphabet = true;
        }
        if (!in_alphabet || choices == 0) return LogReal::zero();
        p *= LogReal::from_linear(delta / static_cast<double>(choices));
      }
      return p;
    }
    case Kind::OneDelete: {
      std::u32string ys = utf8_decode(require_str(y));
      std::u32string zs = utf8_decode(require_str(z));
      if (zs.empty()) return ys.empty() ? LogReal::one() : LogReal::zero();
      if (ys == zs) return LogReal::from_linear(1.0 - delete_delta_);
      if (ys.size() + 1 != zs.size()) return LogReal::zero();
      // Aggregate all deletion positions that produce y.
      size_t ways = 0;
      for (size_t i = 0; i < zs.size(); ++i) {
        std::u32string del = zs;
        del.erase(del.begin() + i);
        if (del == ys) ++ways;
      }
      if (ways == 0) return LogReal::zero();
      return LogReal::from_linear(delete_delta_ * static_cast<double>(ways) /
                                  static_cast<double>(zs.size()));
    }
    case Kind::FirstCharDelete: {
      std::u32string zs = utf8_decode(require_str(z));
      if (!zs.empty()) zs.erase(zs.begin());
      return require_str(y) == utf8_encode(zs) ? LogReal::one()
                                               : LogReal::zero();
    }
    case Kind::Mixture:
      throw std::logic_error("mixture handled at vector level");
  }
  return LogReal::zero();
}

LogReal NoiseModel::pmf(const std::vector<Value>& y,
                        const std::vector<Value>& z) const {
  if (y.size() != z.size()) return LogReal::zero();
  if (kind_ == Kind::Mixture) {
    LogReal total = LogReal::zero();
    for (const auto& [model, w] : components_) {
      total += LogReal::from_linear(w) * model.pmf(y, z);
    }
    return total;
  }
  LogReal p = LogReal::one();
  for (size_t i = 0; i < z.size(); ++i) {
    p *= pmf_one(y[i], z[i]);
    if (p.is_zero()) return p;
  }
  return p;
}

std::vector<std::pair<Value, double>> NoiseModel::support_one(
    const Value& z, size_t cap) const {
  switch (kind_) {
    case Kind::Identity:
      return {{z, 1.0}};
    case Kind::NSub: {
      std::u32string zs = utf8_decode(require_str(z));
      std::vector<std::pair<std::u32string, double>> acc = {{U"", 1.0}};
      for (size_t i = 0; i < zs.size(); ++i) {
        double delta = delta_at(i, zs.size());
        std::u32string alts;
        for (char32_t c : alphabet_) {
          if (c != zs[i]) alts.push_back(c);
        }
        std::vector<std::pair<std::u32string, double>> next;
        for (const auto& [prefix, p] : acc) {
          next.emplace_back(prefix + zs[i],
                            p * (alts.empty() ? 1.0 : 1.0 - delta));
          for (char32_t c : alts) {
            next.emplace_back(prefix + c,
                              p * delta / static_cast<double>(alts.size()));
          }
          if (next.size() > cap) {
            throw ConfigError("noise support exceeds cap of " +
                              std::to_string(cap));
          }
        }
        acc = std::move(next);
      }
      std::vector<std::pair<Value, double>> out;
      out.reserve(acc.size());
      for (const auto& [s, p] : acc) out.emplace_back(Value(utf8_encode(s)), p);
      return out;
    }
    case Kind::OneDelete: {
      std::u32string zs = utf8_decode(require_str(z));
      if (zs.empty()) return {{z, 1.0}};
      std::map<std::string, double> deletions;
      for (size_t i = 0; i < zs.size(); ++i) {
        std::u32string del = zs;
        del.erase(del.begin() + i);
        deletions[utf8_encode(del)] +=
            delete_delta_ / static_cast<double>(zs.size());
      }
      std::vector<std::pair<Value, double>> out;
      out.emplace_back(z, 1.0 - delete_delta_);
      for (const auto& [s, p] : deletions) out.emplace_back(Value(s), p);
      return out;
    }
    case Kind::FirstCharDelete: {
      std::u32string zs = utf8_decode(require_str(z));
      if (!zs.empty()) zs.erase(zs.begin());
      return {{Value(utf8_encode(zs)), 1.0}};
    }
    case Kind::Mixture:
      throw std::logic_error("mixture handled at vector level");
  }
  return {};
}

std::vector<std::pair<std::vector<Value>, double>>
NoiseModel::exhaustive_support(const std::vector<Value>& z, size_t cap) const {
  if (kind_ == Kind::Mixture) {
    std::map<std::string, std::pair<std::vector<Value>, double>> merged;
    for (const auto& [model, w] : components_) {
      for (auto& [values, p] : model.exhaustive_support(z, cap)) {
        auto key = repr(values);
        auto it = merged.find(key);
        if (it == merged.end()) {
          merged.emplace(key, std::make_pair(std::move(values), w * p));
        } else {
          it->second.second += w * p;
        }
      }
      if (merged.size() > cap) {
        throw ConfigError("noise support exceeds cap of " +
                          std::to_string(cap));
      }
    }
    std::vector<std::pair<std::vector<Value>, double>> out;
    out.reserve(merged.size());
    for (auto& [key, entry] : merged) out.push_back(std::move(entry));
    return out;
  }

  std::vector<std::pair<std::vector<Value>, double>> acc = {{{}, 1.0}};
  for (const Value& zi : z) {
    auto options = support_one(zi, cap);
    std::vector<std::pair<std::vector<Value>, double>> next;
    next.reserve(acc.size() * options.size());
    for (const auto& [prefix, p] : acc) {
      for (const auto& [v, q] : options) {
        auto extended = prefix;
        extended.push_back(v);
        next.emplace_back(std::move(extended), p * q);
        if (next.size() > cap) {
          throw ConfigError("noise support exceeds cap of " +
                            std::to_string(cap));
        }
      }
    }
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) {
    return repr(a.first) < repr(b.first);
  });
  return acc;
}

}  // namespace noisynth
