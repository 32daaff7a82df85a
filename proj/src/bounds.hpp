#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "log_prob.hpp"
#include "rng.hpp"
#include "samplesearch.hpp"

namespace mlb {

enum class Heuristic { min, average, max, martingale_permutation, martingale_order };

// Short tags used on the command line and in reports: min, avg, max, perm, ord.
std::string_view heuristic_tag(Heuristic h);
Heuristic parse_heuristic(std::string_view tag);

// Where the binomial coefficient enters the order-statistics bound: inside
// every factor of the product (per_term) or as a single division.
enum class OrderStatForm { per_term, single_division };

struct BoundParams {
  double alpha = 2.0;
  int k = 7;
  int n_inner = 100;
  Heuristic heuristic = Heuristic::average;
  OrderStatForm order_form = OrderStatForm::per_term;

  void validate() const;
  // 1 - alpha^-k.
  double confidence() const;
  // Samples drawn per repetition: 1 for the min heuristic, n_inner otherwise.
  int samples_per_repetition() const { return heuristic == Heuristic::min ? 1 : n_inner; }
};

double confidence(double alpha, int k);

struct LowerBoundResult {
  LogProb log_bound;
  double confidence = 0.0;
  BoundParams params;
  std::optional<double> beta;
  std::vector<LogProb> per_iteration;  // one per completed repetition
  std::uint64_t samples_used = 0;
  std::uint64_t seed = 0;
  int repetitions_completed = 0;
  bool timed_out = false;

  // A zero bound: valid but uninformative.
  bool trivial() const { return log_bound.is_zero(); }
};

using SampleSource = std::function<WeightedSample(RngStream&)>;
// Builds a fresh source per repetition so repetitions can run on separate
// workers without sharing mutable state.
using SampleSourceFactory = std::function<SampleSource()>;

struct RunOptions {
  // Checked between samples; an interrupted repetition is discarded.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  int workers = 1;
};

// k independent repetitions, each on its own child stream rng.derive(r) with
// fresh samples; the bound is the minimum sub-estimate.
LowerBoundResult run_markov_lb(const SampleSourceFactory& make_source, const BoundParams& params,
                               const RngStream& rng, const RunOptions& options = {});
LowerBoundResult run_markov_lb(const SampleSource& source, const BoundParams& params,
                               const RngStream& rng, const RunOptions& options = {});

LogProb lb_min(LogProb w, double alpha);
LogProb lb_average(std::span<const LogProb> ws, double alpha);

struct MaxBound {
  LogProb bound;
  double beta;
};
// beta = 1 / (1 - (1 - 1/alpha)^(1/N)).
double max_heuristic_beta(double alpha, std::size_t n);
MaxBound lb_max(std::span<const LogProb> ws, double alpha);

// Uses ws in the given order; the permutation heuristic shuffles first.
LogProb lb_martingale_sequence(std::span<const LogProb> ws, double alpha);
LogProb lb_martingale_permutation(std::span<const LogProb> ws, double alpha, RngStream& rng);
LogProb lb_martingale_order(std::span<const LogProb> ws, double alpha,
                            OrderStatForm form = OrderStatForm::per_term);

// log C(n, i) via lgamma, exact 0 at the ends.
double log_binomial(std::size_t n, std::size_t i);

std::uint64_t required_samples_dagum(double m, double epsilon, double delta);
std::uint64_t required_samples_cheng(double m, double epsilon, double delta);

// |(log p_exact - log p_approx) / log p_exact|, computed in the given log base.
// Requires 0 < p_exact < 1 and p_approx > 0.
double log_relative_error(LogProb p_exact, LogProb p_approx, double base = std::numbers::e);

}  // namespace mlb
