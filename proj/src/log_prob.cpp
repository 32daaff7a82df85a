#include "log_prob.hpp"

#include <algorithm>

namespace mlb {

LogProb log_sum_exp(std::span<const LogProb> terms) {
  if (terms.empty()) return LogProb::zero();
  const LogProb hi = *std::max_element(terms.begin(), terms.end());
  if (hi.is_zero()) return LogProb::zero();
  double sum = 0.0;
  for (LogProb t : terms) {
    if (!t.is_zero()) sum += std::exp(t.log() - hi.log());
  }
  return LogProb::from_log(hi.log() + std::log(sum));
}

void LogSumAccumulator::add(double log_term) {
  if (log_term == -std::numeric_limits<double>::infinity()) return;
  if (log_term <= max_) {
    scaled_sum_ += std::exp(log_term - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  }
}

LogProb LogSumAccumulator::result() const {
  if (scaled_sum_ == 0.0) return LogProb::zero();
  return LogProb::from_log(max_ + std::log(scaled_sum_));
}

}  // namespace mlb
