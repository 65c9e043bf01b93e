#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kslog {

/// A nonnegative extended real: either a finite double or +infinity.
/// Interval endpoints and bootstrap exponents use this instead of raw
/// sentinel doubles so the infinite case is always explicit.
class ExtReal {
 public:
  ExtReal() : v_(0.0) {}

  explicit ExtReal(double v) : v_(v) {
    if (std::isnan(v)) throw std::domain_error("ExtReal: NaN is not a value");
  }

  static ExtReal infinity() {
    ExtReal r;
    r.v_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool finite() const { return std::isfinite(v_); }
  bool infinite() const { return std::isinf(v_); }

  /// Finite value; throws when infinite.
  double value() const {
    if (!finite()) throw std::domain_error("ExtReal: value() on infinity");
    return v_;
  }

  /// Underlying double, +inf allowed. Safe for IEEE comparisons.
  double raw() const { return v_; }

  friend bool operator==(const ExtReal& a, const ExtReal& b) { return a.v_ == b.v_; }
  friend bool operator<(const ExtReal& a, const ExtReal& b) { return a.v_ < b.v_; }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return a.v_ <= b.v_; }
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return a.v_ > b.v_; }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return a.v_ >= b.v_; }

  std::string str() const { return finite() ? std::to_string(v_) : "inf"; }

 private:
  double v_;
};

}  // namespace kslog
