#pragma once

#include <cmath>
#include <limits>

namespace noisynth {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Nonnegative real stored as its natural log; zero is -inf. Products and
// ratios stay exact in log space, sums go through log1p so that weight
// normalization does not underflow at larger height bounds.
class LogReal {
 public:
  LogReal() : log_(-kInfinity) {}

  static LogReal from_linear(double v) {
    LogReal r;
    r.log_ = v > 0 ? std::log(v) : -kInfinity;
    return r;
  }
  static LogReal from_log(double lg) {
    LogReal r;
    r.log_ = lg;
    return r;
  }
  static LogReal zero() { return LogReal(); }
  static LogReal one() { return from_log(0.0); }

  double log() const { return log_; }
  double linear() const { return std::exp(log_); }
  bool is_zero() const { return std::isinf(log_) && log_ < 0; }

  LogReal& operator+=(LogReal o) {
    if (is_zero()) {
      log_ = o.log_;
    } else if (!o.is_zero()) {
      double hi = std::max(log_, o.log_);
      double lo = std::min(log_, o.log_);
      log_ = hi + std::log1p(std::exp(lo - hi));
    }
    return *this;
  }
  LogReal& operator*=(LogReal o) {
    log_ += o.log_;
    return *this;
  }

  friend LogReal operator+(LogReal a, LogReal b) { return a += b; }
  friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }
  friend LogReal operator/(LogReal a, LogReal b) {
    return from_log(a.log_ - b.log_);
  }
  friend bool operator<(LogReal a, LogReal b) { return a.log_ < b.log_; }
  friend bool operator>(LogReal a, LogReal b) { return a.log_ > b.log_; }
  friend bool operator==(LogReal a, LogReal b) { return a.log_ == b.log_; }

 private:
  double log_;
};

// -log p as an extended real with -log 0 = +inf. Shared convention for the
// whole loss catalog; +inf is absorbing under addition.
inline double neg_log(LogReal p) { return p.is_zero() ? kInfinity : -p.log(); }

}  // namespace noisynth
