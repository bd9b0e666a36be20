#include "noisynth/loss.hpp"

#include <cmath>

#include "noisynth/distances.hpp"
#include "noisynth/errors.hpp"
#include "noisynth/logreal.hpp"
#include "noisynth/unicode.hpp"

namespace noisynth {

namespace {

void require_equal_length(const std::vector<Value>& z,
                          const std::vector<Value>& y) {
  if (z.size() != y.size()) {
    throw ConfigError("loss requires equal-length vectors, got " +
                      std::to_string(z.size()) + " and " +
                      std::to_string(y.size()));
  }
}

const std::string& require_str(const Value& v) {
  if (!v.is_str()) {
    throw std::runtime_error("string loss applied to non-string value " +
                             v.repr());
  }
  return v.as_str();
}

void require_delta(const std::vector<double>& delta) {
  if (delta.empty()) throw ConfigError("loss requires a delta");
  for (double d : delta) {
    if (!(d > 0.0 && d < 1.0)) {
      throw ConfigError("loss delta must lie strictly inside (0, 1), got " +
                        std::to_string(d));
    }
  }
}

// True when deleting exactly one character of z yields y.
bool one_deletion_away(const std::u32string& z, const std::u32string& y) {
  if (y.size() + 1 != z.size()) return false;
  size_t i = 0;
  while (i < y.size() && y[i] == z[i]) ++i;
  // Skip z[i] and require the tails to match.
  return std::equal(y.begin() + i, y.end(), z.begin() + i + 1);
}

}  // namespace

LossFn LossFn::zero_one() { return LossFn(); }

LossFn LossFn::zero_infty() {
  LossFn f;
  f.kind_ = Kind::ZeroInfty;
  return f;
}

LossFn LossFn::n_substitution(std::vector<double> delta) {
  require_delta(delta);
  LossFn f;
  f.kind_ = Kind::NSub;
  f.delta_ = std::move(delta);
  return f;
}

LossFn LossFn::n_substitution(double delta) {
  return n_substitution(std::vector<double>{delta});
}

LossFn LossFn::one_delete(double delta) {
  require_delta({delta});
  LossFn f;
  f.kind_ = Kind::OneDelete;
  f.delta_ = {delta};
  return f;
}

LossFn LossFn::dl() {
  LossFn f;
  f.kind_ = Kind::Dl;
  return f;
}

LossFn LossFn::l_ab() {
  LossFn f;
  f.kind_ = Kind::LAb;
  return f;
}

LossFn LossFn::optimal(NoiseModel noise) {
  LossFn f;
  f.kind_ = Kind::Optimal;
  f.noises_.emplace_back(std::move(noise), 1.0);
  return f;
}

LossFn LossFn::mixture_optimal(
    std::vector<std::pair<NoiseModel, double>> parts) {
  if (parts.empty()) throw ConfigError("mixture_optimal requires components");
  double total = 0;
  for (const auto& [model, w] : parts) {
    if (!(w > 0)) throw ConfigError("mixture_optimal weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("mixture_optimal weights must sum to 1, got " +
                      std::to_string(total));
  }
  LossFn f;
  f.kind_ = Kind::MixtureOptimal;
  f.noises_ = std::move(parts);
  return f;
}

LossFn LossFn::from_json(const nlohmann::json& j) {
  std::string kind = j.is_string() ? j.get<std::string>()
                                   : j.at("kind").get<std::string>();
  if (kind == "zero_one") return zero_one();
  if (kind == "zero_infty") return zero_infty();
  if (kind == "dl") return dl();
  if (kind == "l_ab") return l_ab();
  if (kind == "n_substitution") {
    std::vector<double> delta;
    if (j.at("delta").is_array()) {
      delta = j["delta"].get<std::vector<double>>();
    } else {
      delta.push_back(j["delta"].get<double>());
    }
    return n_substitution(std::move(delta));
  }
  if (kind == "one_delete") return one_delete(j.at("delta").get<double>());
  if (kind == "optimal") return optimal(NoiseModel::from_json(j.at("noise")));
  if (kind == "mixture_optimal") {
    std::vector<std::pair<NoiseModel, double>> parts;
    for (const auto& c : j.at("components")) {
      parts.emplace_back(NoiseModel::from_json(c.at("noise")),
                         c.at("weight").get<double>());
    }
    return mixture_optimal(std::move(parts));
  }
  throw ConfigError("unknown loss kind: " + kind);
}

nlohmann::json LossFn::to_json() const {
  switch (kind_) {
    case Kind::ZeroOne:
      return {{"kind", "zero_one"}};
    case Kind::ZeroInfty:
      return {{"kind", "zero_infty"}};
    case Kind::Dl:
      return {{"kind", "dl"}};
    case Kind::LAb:
      return {{"kind", "l_ab"}};
    case Kind::NSub: {
      nlohmann::json j{{"kind", "n_substitution"}};
      if (delta_.size() == 1) {
        j["delta"] = delta_[0];
      } else {
        j["delta"] = delta_;
      }
      return j;
    }
    case Kind::OneDelete:
      return {{"kind", "one_delete"}, {"delta", delta_[0]}};
    case Kind::Optimal:
      return {{"kind", "optimal"}, {"noise", noises_[0].first.to_json()}};
    case Kind::MixtureOptimal: {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& [model, w] : noises_) {
        parts.push_back({{"weight", w}, {"noise", model.to_json()}});
      }
      return {{"kind", "mixture_optimal"}, {"components", parts}};
    }
  }
  return {};
}

std::string LossFn::describe() const { return to_json().dump(); }

double LossFn::delta_at(size_t pos) const {
  if (delta_.size() == 1) return delta_[0];
  if (pos >= delta_.size()) {
    throw ConfigError("loss delta vector has " + std::to_string(delta_.size()) +
                      " entries, string position " + std::to_string(pos) +
                      " requested");
  }
  return delta_[pos];
}

double LossFn::eval(const std::vector<Value>& z,
                    const std::vector<Value>& y) const {
  switch (kind_) {
    case Kind::ZeroOne: {
      require_equal_length(z, y);
      double loss = 0;
      for (size_t i = 0; i < z.size(); ++i) loss += z[i] != y[i] ? 1.0 : 0.0;
      return loss;
    }
    case Kind::ZeroInfty: {
      require_equal_length(z, y);
      return z == y ? 0.0 : kInfinity;
    }
    case Kind::NSub: {
      require_equal_length(z, y);
      double loss = 0;
      for (size_t i = 0; i < z.size(); ++i) {
        std::u32string zs = utf8_decode(require_str(z[i]));
        std::u32string ys = utf8_decode(require_str(y[i]));
        if (zs.size() != ys.size()) return kInfinity;
        // Written as -log(1 - delta) rather than -log1p(-delta) so the value
        // matches the optimal-loss path (which goes through the pmf) exactly.
        for (size_t p = 0; p < zs.size(); ++p) {
          double delta = delta_at(p);
          loss += zs[p] == ys[p] ? -std::log(1.0 - delta) : -std::log(delta);
        }
      }
      return loss;
    }
    case Kind::OneDelete: {
      require_equal_length(z, y);
      double delta = delta_[0];
      double loss = 0;
      for (size_t i = 0; i < z.size(); ++i) {
        std::u32string zs = utf8_decode(require_str(z[i]));
        std::u32string ys = utf8_decode(require_str(y[i]));
        if (zs == ys) {
          loss += -std::log(1.0 - delta);
        } else if (one_deletion_away(zs, ys)) {
          loss += -std::log(delta);
        } else {
          return kInfinity;
        }
      }
      return loss;
    }
    case Kind::Dl: {
      require_equal_length(z, y);
      double loss = 0;
      for (size_t i = 0; i < z.size(); ++i) {
        loss += static_cast<double>(
            dl_metric(require_str(z[i]), require_str(y[i])));
      }
      return loss;
    }
    case Kind::LAb: {
      // Per example: 0 when y is exactly z with its first character deleted
      // (empty z only matches empty y), infinity otherwise. This is the
      // consistency check for programs that put one marker character in
      // front of their input.
      require_equal_length(z, y);
      for (size_t i = 0; i < z.size(); ++i) {
        std::u32string zs = utf8_decode(require_str(z[i]));
        std::u32string ys = utf8_decode(require_str(y[i]));
        if (!zs.empty()) zs.erase(zs.begin());
        if (zs != ys) return kInfinity;
      }
      return 0.0;
    }
    case Kind::Optimal:
      return neg_log(noises_[0].first.pmf(y, z));
    case Kind::MixtureOptimal: {
      LogReal p = LogReal::zero();
      for (const auto& [model, w] : noises_) {
        p += LogReal::from_linear(w) * model.pmf(y, z);
      }
      return neg_log(p);
    }
  }
  throw ConfigError("invalid loss");
}

}  // namespace noisynth
