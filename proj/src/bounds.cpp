#include "bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace mlb {

std::string_view heuristic_tag(Heuristic h) {
  switch (h) {
    case Heuristic::min: return "min";
    case Heuristic::average: return "avg";
    case Heuristic::max: return "max";
    case Heuristic::martingale_permutation: return "perm";
    case Heuristic::martingale_order: return "ord";
  }
  return "?";
}

Heuristic parse_heuristic(std::string_view tag) {
  if (tag == "min") return Heuristic::min;
  if (tag == "avg" || tag == "average") return Heuristic::average;
  if (tag == "max") return Heuristic::max;
  if (tag == "perm") return Heuristic::martingale_permutation;
  if (tag == "ord") return Heuristic::martingale_order;
  throw InvalidArgument("unknown heuristic '" + std::string(tag) + "'");
}

double confidence(double alpha, int k) { return 1.0 - std::pow(alpha, -static_cast<double>(k)); }

void BoundParams::validate() const {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be > 1");
  if (k < 1) throw InvalidArgument("k must be a positive integer");
  if (n_inner < 1) throw InvalidArgument("samples per repetition must be positive");
}

double BoundParams::confidence() const { return mlb::confidence(alpha, k); }

LogProb lb_min(LogProb w, double alpha) {
  if (w.is_zero()) return w;
  return LogProb::from_log(w.log() - std::log(alpha));
}

LogProb lb_average(std::span<const LogProb> ws, double alpha) {
  if (ws.empty()) throw InvalidArgument("average heuristic needs at least one weight");
  const LogProb sum = log_sum_exp(ws);
  if (sum.is_zero()) return sum;
  return LogProb::from_log(sum.log() - std::log(static_cast<double>(ws.size())) - std::log(alpha));
}

double max_heuristic_beta(double alpha, std::size_t n) {
  if (n == 0) throw InvalidArgument("max heuristic needs at least one weight");
  if (n == 1) return alpha;
  // 1 - (1 - 1/alpha)^(1/n), evaluated without cancellation.
  const double tail = -std::expm1(std::log1p(-1.0 / alpha) / static_cast<double>(n));
  return 1.0 / tail;
}

MaxBound lb_max(std::span<const LogProb> ws, double alpha) {
  if (ws.empty()) throw InvalidArgument("max heuristic needs at least one weight");
  const double beta = max_heuristic_beta(alpha, ws.size());
  const LogProb top = *std::max_element(ws.begin(), ws.end());
  if (top.is_zero()) return {top, beta};
  return {LogProb::from_log(top.log() - std::log(beta)), beta};
}

LogProb lb_martingale_sequence(std::span<const LogProb> ws, double alpha) {
  if (ws.empty()) throw InvalidArgument("martingale heuristic needs at least one weight");
  const double log_alpha = std::log(alpha);
  double prefix = 0.0;
  double best = -INFINITY;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    prefix += ws[i].log();
    if (prefix == -INFINITY) break;  // every later prefix product is zero too
    best = std::max(best, (prefix - log_alpha) / static_cast<double>(i + 1));
  }
  return LogProb::from_log(best);
}

LogProb lb_martingale_permutation(std::span<const LogProb> ws, double alpha, RngStream& rng) {
  std::vector<LogProb> shuffled(ws.begin(), ws.end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  return lb_martingale_sequence(shuffled, alpha);
}

double log_binomial(std::size_t n, std::size_t i) {
  if (i == 0 || i == n) return 0.0;
  const auto nd = static_cast<double>(n);
  const auto id = static_cast<double>(i);
  return std::lgamma(nd + 1.0) - std::lgamma(id + 1.0) - std::lgamma(nd - id + 1.0);
}

LogProb lb_martingale_order(std::span<const LogProb> ws, double alpha, OrderStatForm form) {
  if (ws.empty()) throw InvalidArgument("order-statistics heuristic needs at least one weight");
  std::vector<LogProb> sorted(ws.begin(), ws.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double log_alpha = std::log(alpha);
  const std::size_t n = sorted.size();
  double prefix = 0.0;
  double best = -INFINITY;
  for (std::size_t i = 1; i <= n; ++i) {
    prefix += sorted[i - 1].log();
    if (prefix == -INFINITY) break;
    const double lc = log_binomial(n, i);
    const double binomial_term = form == OrderStatForm::per_term ? static_cast<double>(i) * lc : lc;
    best = std::max(best, (prefix - binomial_term - log_alpha) / static_cast<double>(i));
  }
  return LogProb::from_log(best);
}

namespace {

LogProb sub_estimate(const BoundParams& params, std::span<const LogProb> ws, RngStream& stream) {
  switch (params.heuristic) {
    case Heuristic::min: return lb_min(ws.front(), params.alpha);
    case Heuristic::average: return lb_average(ws, params.alpha);
    case Heuristic::max: return lb_max(ws, params.alpha).bound;
    case Heuristic::martingale_permutation: return lb_martingale_permutation(ws, params.alpha, stream);
    case Heuristic::martingale_order: return lb_martingale_order(ws, params.alpha, params.order_form);
  }
  throw InvalidArgument("unknown heuristic");
}

}  // namespace

LowerBoundResult run_markov_lb(const SampleSourceFactory& make_source, const BoundParams& params,
                               const RngStream& rng, const RunOptions& options) {
  params.validate();
  const int m = params.samples_per_repetition();
  std::vector<std::optional<LogProb>> outcome(static_cast<std::size_t>(params.k));

  auto expired = [&] {
    return options.deadline && std::chrono::steady_clock::now() >= *options.deadline;
  };
  auto run_repetition = [&](int r) -> std::optional<LogProb> {
    RngStream stream = rng.derive(static_cast<std::uint64_t>(r));
    SampleSource source = make_source();
    std::vector<LogProb> ws;
    ws.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      if (expired()) return std::nullopt;
      ws.push_back(source(stream).log_weight);
    }
    return sub_estimate(params, ws, stream);
  };

  const int workers = std::clamp(options.workers, 1, params.k);
  if (workers == 1) {
    for (int r = 0; r < params.k; ++r) {
      outcome[static_cast<std::size_t>(r)] = run_repetition(r);
      if (!outcome[static_cast<std::size_t>(r)]) break;
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < params.k; r = next++) {
          try {
            outcome[static_cast<std::size_t>(r)] = run_repetition(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  LowerBoundResult result;
  result.params = params;
  result.seed = rng.seed();
  if (params.heuristic == Heuristic::max)
    result.beta = max_heuristic_beta(params.alpha, static_cast<std::size_t>(m));
  bool first = true;
  for (const auto& o : outcome) {
    if (!o) {
      result.timed_out = true;
      continue;
    }
    result.per_iteration.push_back(*o);
    result.log_bound = first ? *o : std::min(result.log_bound, *o);
    first = false;
  }
  result.repetitions_completed = static_cast<int>(result.per_iteration.size());
  result.samples_used = static_cast<std::uint64_t>(result.repetitions_completed) * static_cast<std::uint64_t>(m);
  result.confidence = result.repetitions_completed > 0
                          ? confidence(params.alpha, result.repetitions_completed)
                          : 0.0;
  return result;
}

LowerBoundResult run_markov_lb(const SampleSource& source, const BoundParams& params,
                               const RngStream& rng, const RunOptions& options) {
  RunOptions sequential = options;
  sequential.workers = 1;
  return run_markov_lb([&source] { return source; }, params, rng, sequential);
}

namespace {

void check_sample_size_inputs(double m, double epsilon, double delta) {
  if (!(m > 0.0)) throw InvalidArgument("M must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
}

std::uint64_t ceil_count(double v) {
  if (!std::isfinite(v) || v >= 1.8e19) throw InvalidArgument("required sample count overflows");
  return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

std::uint64_t required_samples_dagum(double m, double epsilon, double delta) {
  check_sample_size_inputs(m, epsilon, delta);
  return ceil_count(4.0 / (m * epsilon * epsilon) * std::log(2.0 / delta));
}

std::uint64_t required_samples_cheng(double m, double epsilon, double delta) {
  check_sample_size_inputs(m, epsilon, delta);
  const double denom = (1.0 + epsilon) * std::log1p(epsilon) - epsilon;
  if (!(denom > 0.0)) throw InvalidArgument("epsilon too small for a finite sample count");
  return ceil_count(1.0 / m * (1.0 / denom) * std::log(2.0 / delta));
}

double log_relative_error(LogProb p_exact, LogProb p_approx, double base) {
  if (p_exact.is_zero() || !(p_exact.log() < 0.0))
    throw InvalidArgument("log-relative error needs 0 < P_exact < 1");
  if (p_approx.is_zero()) throw InvalidArgument("log-relative error needs P_approx > 0");
  if (!(base > 0.0) || base == 1.0) throw InvalidArgument("invalid log base");
  const double scale = std::log(base);
  const double exact = p_exact.log() / scale;
  const double approx = p_approx.log() / scale;
  return std::abs((exact - approx) / exact);
}

}  // namespace mlb
