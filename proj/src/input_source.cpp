#include "noisynth/input_source.hpp"

#include <set>

#include "noisynth/errors.hpp"
#include "noisynth/unicode.hpp"

namespace noisynth {

InputSource InputSource::from_json(const nlohmann::json& j) {
  InputSource s;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "int_uniform") {
    s.kind_ = Kind::IntUniform;
    s.var_ = j.at("var").get<std::string>();
    s.lo_ = j.at("lo").get<int64_t>();
    s.hi_ = j.at("hi").get<int64_t>();
    if (s.lo_ > s.hi_) throw ConfigError("int_uniform requires lo <= hi");
  } else if (kind == "str_random") {
    s.kind_ = Kind::StrRandom;
    s.var_ = j.at("var").get<std::string>();
    s.alphabet_ = utf8_decode(j.at("alphabet").get<std::string>());
    if (s.alphabet_.empty()) {
      throw ConfigError("str_random requires a nonempty alphabet");
    }
    s.min_len_ = j.value("min_len", 0);
    s.max_len_ = j.at("max_len").get<int>();
    if (s.min_len_ < 0 || s.min_len_ > s.max_len_) {
      throw ConfigError("str_random requires 0 <= min_len <= max_len");
    }
  } else if (kind == "bool_bernoulli") {
    s.kind_ = Kind::BoolBernoulli;
    s.var_ = j.at("var").get<std::string>();
    s.p_ = j.at("p").get<double>();
    if (s.p_ < 0 || s.p_ > 1) {
      throw ConfigError("bool_bernoulli requires p in [0, 1]");
    }
  } else if (kind == "categorical") {
    s.kind_ = Kind::Categorical;
    for (const auto& e : j.at("envs")) s.envs_.push_back(env_from_json(e));
    if (s.envs_.empty()) throw ConfigError("categorical requires envs");
    if (j.contains("probs")) {
      s.probs_ = j["probs"].get<std::vector<double>>();
      if (s.probs_.size() != s.envs_.size()) {
        throw ConfigError("categorical probs must match envs");
      }
      double total = 0;
      for (double p : s.probs_) {
        if (!(p >= 0)) throw ConfigError("categorical probs must be >= 0");
        total += p;
      }
      if (!(total > 0)) throw ConfigError("categorical probs must sum > 0");
      for (double& p : s.probs_) p /= total;
    } else {
      s.probs_.assign(s.envs_.size(), 1.0 / s.envs_.size());
    }
  } else if (kind == "product") {
    s.kind_ = Kind::Product;
    for (const auto& c : j.at("components")) {
      s.components_.push_back(from_json(c));
    }
    if (s.components_.empty()) throw ConfigError("product requires components");
    std::set<std::string> seen;
    for (const auto& c : s.components_) {
      for (const auto& v : c.variables()) {
        if (!seen.insert(v).second) {
          throw ConfigError("product components bind variable " + v + " twice");
        }
      }
    }
  } else {
    throw ConfigError("unknown input source kind: " + kind);
  }
  return s;
}

nlohmann::json InputSource::to_json() const {
  switch (kind_) {
    case Kind::IntUniform:
      return {{"kind", "int_uniform"}, {"var", var_}, {"lo", lo_}, {"hi", hi_}};
    case Kind::StrRandom:
      return {{"kind", "str_random"},
              {"var", var_},
              {"alphabet", utf8_encode(alphabet_)},
              {"min_len", min_len_},
              {"max_len", max_len_}};
    case Kind::BoolBernoulli:
      return {{"kind", "bool_bernoulli"}, {"var", var_}, {"p", p_}};
    case Kind::Categorical: {
      nlohmann::json envs = nlohmann::json::array();
      for (const auto& e : envs_) envs.push_back(env_to_json(e));
      return {{"kind", "categorical"}, {"envs", envs}, {"probs", probs_}};
    }
    case Kind::Product: {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& c : components_) parts.push_back(c.to_json());
      return {{"kind", "product"}, {"components", parts}};
    }
  }
  return {};
}

InputEnv InputSource::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::IntUniform: {
      uint64_t span = static_cast<uint64_t>(hi_ - lo_) + 1;
      return {{var_, Value(lo_ + static_cast<int64_t>(rng.uniform_below(span)))}};
    }
    case Kind::StrRandom: {
      int len = min_len_ + static_cast<int>(rng.uniform_below(
                               static_cast<uint64_t>(max_len_ - min_len_) + 1));
      std::u32string s;
      s.reserve(len);
      for (int i = 0; i < len; ++i) {
        s.push_back(alphabet_[rng.uniform_below(alphabet_.size())]);
      }
      return {{var_, Value(utf8_encode(s))}};
    }
    case Kind::BoolBernoulli:
      return {{var_, Value(rng.bernoulli(p_))}};
    case Kind::Categorical: {
      double u = rng.uniform();
      double acc = 0;
      for (size_t i = 0; i < envs_.size(); ++i) {
        acc += probs_[i];
        if (u < acc) return envs_[i];
      }
      return envs_.back();
    }
    case Kind::Product: {
      InputEnv env;
      for (const auto& c : components_) {
        for (auto& [k, v] : c.sample(rng)) env.emplace(k, std::move(v));
      }
      return env;
    }
  }
  return {};
}

std::vector<std::string> InputSource::variables() const {
  switch (kind_) {
    case Kind::IntUniform:
    case Kind::StrRandom:
    case Kind::BoolBernoulli:
      return {var_};
    case Kind::Categorical: {
      std::set<std::string> vars;
      for (const auto& e : envs_) {
        for (const auto& [k, v] : e) vars.insert(k);
      }
      return {vars.begin(), vars.end()};
    }
    case Kind::Product: {
      std::vector<std::string> vars;
      for (const auto& c : components_) {
        for (auto& v : c.variables()) vars.push_back(v);
      }
      return vars;
    }
  }
  return {};
}

std::optional<std::vector<InputEnv>> InputSource::support(size_t cap) const {
  switch (kind_) {
    case Kind::IntUniform: {
      uint64_t span = static_cast<uint64_t>(hi_ - lo_) + 1;
      if (span > cap) return std::nullopt;
      std::vector<InputEnv> out;
      for (int64_t v = lo_; v <= hi_; ++v) out.push_back({{var_, Value(v)}});
      return out;
    }
    case Kind::StrRandom: {
      std::vector<InputEnv> out;
      std::vector<std::u32string> cur = {U""};
      for (int len = 0; len <= max_len_; ++len) {
        if (len >= min_len_) {
          for (const auto& s : cur) {
            out.push_back({{var_, Value(utf8_encode(s))}});
            if (out.size() > cap) return std::nullopt;
          }
        }
        if (len == max_len_) break;
        std::vector<std::u32string> next;
        next.reserve(cur.size() * alphabet_.size());
        for (const auto& s : cur) {
          for (char32_t c : alphabet_) next.push_back(s + c);
          if (next.size() > cap + 1) return std::nullopt;
        }
        cur = std::move(next);
      }
      return out;
    }
    case Kind::BoolBernoulli: {
      std::vector<InputEnv> out;
      if (p_ < 1.0) out.push_back({{var_, Value(false)}});
      if (p_ > 0.0) out.push_back({{var_, Value(true)}});
      return out;
    }
    case Kind::Categorical: {
      std::vector<InputEnv> out;
      for (size_t i = 0; i < envs_.size(); ++i) {
        if (probs_[i] > 0) out.push_back(envs_[i]);
      }
      return out;
    }
    case Kind::Product: {
      std::vector<InputEnv> acc = {{}};
      for (const auto& c : components_) {
        auto part = c.support(cap);
        if (!part) return std::nullopt;
        std::vector<InputEnv> next;
        for (const auto& base : acc) {
          for (const auto& extra : *part) {
            InputEnv merged = base;
            for (const auto& [k, v] : extra) merged.emplace(k, v);
            next.push_back(std::move(merged));
            if (next.size() > cap) return std::nullopt;
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return std::nullopt;
}

}  // namespace noisynth
