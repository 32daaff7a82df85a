#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <span>

#include "error.hpp"

namespace mlb {

// Natural log of a nonnegative quantity. log 0 is -infinity; NaN is never
// stored. Values above 0 are allowed (importance weights can exceed 1).
class LogProb {
 public:
  constexpr LogProb() = default;

  static constexpr LogProb zero() { return LogProb(); }
  static constexpr LogProb one() { return from_log_unchecked(0.0); }

  static LogProb from_log(double v) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw InvalidArgument("LogProb: log value must be finite or -inf");
    return from_log_unchecked(v);
  }

  static LogProb from_linear(double p) {
    if (!(p >= 0.0) || std::isinf(p))
      throw InvalidArgument("LogProb: linear value must be finite and >= 0");
    return from_log_unchecked(std::log(p));
  }

  constexpr double log() const { return value_; }
  double linear() const { return std::exp(value_); }
  constexpr bool is_zero() const {
    return value_ == -std::numeric_limits<double>::infinity();
  }

  // Raises the underlying quantity to a finite positive power.
  LogProb pow(double exponent) const {
    if (is_zero()) return zero();
    return from_log(value_ * exponent);
  }

  friend LogProb operator*(LogProb a, LogProb b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log(a.value_ + b.value_);
  }

  friend LogProb operator/(LogProb a, LogProb b) {
    if (b.is_zero()) throw InvalidArgument("LogProb: division by zero");
    if (a.is_zero()) return zero();
    return from_log(a.value_ - b.value_);
  }

  // log(exp(a) + exp(b)); a -inf addend is dropped.
  friend LogProb operator+(LogProb a, LogProb b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = a.value_ > b.value_ ? a.value_ : b.value_;
    const double lo = a.value_ > b.value_ ? b.value_ : a.value_;
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  LogProb& operator*=(LogProb o) { return *this = *this * o; }
  LogProb& operator+=(LogProb o) { return *this = *this + o; }

  friend constexpr bool operator==(LogProb a, LogProb b) {
    return a.value_ == b.value_;
  }
  friend constexpr auto operator<=>(LogProb a, LogProb b) {
    return a.value_ <=> b.value_;
  }

 private:
  static constexpr LogProb from_log_unchecked(double v) {
    LogProb p;
    p.value_ = v;
    return p;
  }

  double value_ = -std::numeric_limits<double>::infinity();
};

// Two-pass log-sum-exp; empty input and all -inf input give log 0.
LogProb log_sum_exp(std::span<const LogProb> terms);

// Streaming log-sum-exp with a running maximum.
class LogSumAccumulator {
 public:
  void add(double log_term);
  void add(LogProb p) { add(p.log()); }
  LogProb result() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

}  // namespace mlb
