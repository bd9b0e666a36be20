#include "noisynth/distances.hpp"

#include "noisynth/errors.hpp"
#include "noisynth/unicode.hpp"

namespace noisynth {

namespace {

void require_equal_length(const std::vector<Value>& a,
                          const std::vector<Value>& b) {
  if (a.size() != b.size()) {
    throw ConfigError("distance requires equal-length vectors, got " +
                      std::to_string(a.size()) + " and " +
                      std::to_string(b.size()));
  }
}

const std::string& require_str(const Value& v) {
  if (!v.is_str()) {
    throw ConfigError("string distance applied to non-string value " +
                      v.repr());
  }
  return v.as_str();
}

}  // namespace

int64_t counting_distance(const std::vector<Value>& a,
                          const std::vector<Value>& b) {
  require_equal_length(a, b);
  int64_t d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
  return d;
}

int64_t length_distance(const std::vector<Value>& a,
                        const std::vector<Value>& b) {
  require_equal_length(a, b);
  int64_t d = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    d += utf8_decode(require_str(a[i])).size() !=
                 utf8_decode(require_str(b[i])).size()
             ? 1
             : 0;
  }
  return d;
}

int64_t dl_metric(const std::string& a_utf8, const std::string& b_utf8) {
  std::u32string a = utf8_decode(a_utf8);
  std::u32string b = utf8_decode(b_utf8);
  size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int64_t>(m);
  if (m == 0) return static_cast<int64_t>(n);

  // Three-row DP: row[i][j] = distance between a[0..i) and b[0..j).
  std::vector<int64_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      int64_t del = prev[j] + 1;
      int64_t ins = cur[j - 1] + 1;
      int64_t best = std::min(sub, std::min(del, ins));
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        best = std::min(best, prev2[j - 2] + 1);
      }
      cur[j] = best;
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

int64_t dl_k_distance(int k, const std::vector<Value>& a,
                      const std::vector<Value>& b) {
  if (k < 1) throw ConfigError("dl_k requires k >= 1");
  require_equal_length(a, b);
  int64_t d = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    d += dl_metric(require_str(a[i]), require_str(b[i])) >= k ? 1 : 0;
  }
  return d;
}

int64_t dl_sum_distance(const std::vector<Value>& a,
                        const std::vector<Value>& b) {
  require_equal_length(a, b);
  int64_t d = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    d += dl_metric(require_str(a[i]), require_str(b[i]));
  }
  return d;
}

DistanceFn DistanceFn::from_json(const nlohmann::json& j) {
  DistanceFn f;
  std::string kind = j.is_string() ? j.get<std::string>()
                                   : j.at("kind").get<std::string>();
  if (kind == "counting") {
    f.kind_ = Kind::Counting;
  } else if (kind == "length") {
    f.kind_ = Kind::Length;
  } else if (kind == "dl_k") {
    f.kind_ = Kind::DlK;
    f.k_ = j.at("k").get<int>();
    if (f.k_ < 1) throw ConfigError("dl_k requires k >= 1");
  } else if (kind == "dl_sum") {
    f.kind_ = Kind::DlSum;
  } else {
    throw ConfigError("unknown distance kind: " + kind);
  }
  return f;
}

nlohmann::json DistanceFn::to_json() const {
  switch (kind_) {
    case Kind::Counting:
      return {{"kind", "counting"}};
    case Kind::Length:
      return {{"kind", "length"}};
    case Kind::DlK:
      return {{"kind", "dl_k"}, {"k", k_}};
    case Kind::DlSum:
      return {{"kind", "dl_sum"}};
  }
  return {};
}

int64_t DistanceFn::eval(const std::vector<Value>& a,
                         const std::vector<Value>& b) const {
  switch (kind_) {
    case Kind::Counting:
      return counting_distance(a, b);
    case Kind::Length:
      return length_distance(a, b);
    case Kind::DlK:
      return dl_k_distance(k_, a, b);
    case Kind::DlSum:
      return dl_sum_distance(a, b);
  }
  throw ConfigError("invalid distance");
}

}  // namespace noisynth
