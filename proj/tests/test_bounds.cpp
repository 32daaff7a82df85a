#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "bounds.hpp"
#include "error.hpp"

using namespace mlb;

namespace {

std::vector<LogProb> linear(std::initializer_list<double> ws) {
  std::vector<LogProb> out;
  for (double w : ws) out.push_back(LogProb::from_linear(w));
  return out;
}

WeightedSample constant_sample(double w) {
  WeightedSample s;
  s.log_weight = LogProb::from_linear(w);
  return s;
}

// Weight 1 with probability 1/2 and 3 otherwise, mean 2.
SampleSource two_point() {
  return [](RngStream& rng) { return constant_sample(rng.uniform() < 0.5 ? 1.0 : 3.0); };
}

}  // namespace

TEST_CASE("confidence") {
  CHECK(confidence(2.0, 7) == 0.9921875);
  CHECK(BoundParams{}.confidence() == 0.9921875);
  CHECK_THROWS_AS((BoundParams{1.0, 7, 100}.validate()), InvalidArgument);
  CHECK_THROWS_AS((BoundParams{2.0, 0, 100}.validate()), InvalidArgument);
  CHECK_THROWS_AS((BoundParams{2.0, 7, 0}.validate()), InvalidArgument);
}

TEST_CASE("min heuristic") {
  CHECK(lb_min(LogProb::from_linear(8.0), 2.0).linear() == doctest::Approx(4.0));
  CHECK(lb_min(LogProb::zero(), 2.0).is_zero());
  const double c = 7.5;
  CHECK(lb_min(LogProb::from_linear(3.0 * c), 2.0).linear() ==
        doctest::Approx(c * lb_min(LogProb::from_linear(3.0), 2.0).linear()));
  for (int k : {1, 3, 7}) {
    const BoundParams p{2.0, k, 100, Heuristic::min};
    const auto source = [](RngStream&) { return constant_sample(5.0); };
    const LowerBoundResult r = run_markov_lb(source, p, RngStream(1));
    CHECK(r.log_bound.linear() == doctest::Approx(2.5));
    CHECK(r.samples_used == static_cast<std::uint64_t>(k));
  }
}

TEST_CASE("average heuristic") {
  CHECK(lb_average(linear({2, 8}), 2.0).linear() == doctest::Approx(2.5));
  CHECK(lb_average(std::vector<LogProb>{LogProb::zero(), LogProb::zero()}, 2.0).is_zero());
  const LogProb w = LogProb::from_linear(3.0);
  CHECK(lb_average(std::vector<LogProb>{w}, 2.0) == lb_min(w, 2.0));
}

TEST_CASE("max heuristic") {
  CHECK(max_heuristic_beta(2.0, 100) == doctest::Approx(144.77).epsilon(0.01 / 144.77));
  CHECK(max_heuristic_beta(2.0, 1) == 2.0);
  const MaxBound b = lb_max(linear({2, 8}), 2.0);
  CHECK(b.beta == doctest::Approx(1.0 / (1.0 - std::sqrt(0.5))));
  CHECK(b.beta == doctest::Approx(3.41421).epsilon(1e-5));
  CHECK(b.bound.linear() == doctest::Approx(8.0 / 3.41421356).epsilon(1e-6));
}

TEST_CASE("martingale heuristics") {
  const auto ws = linear({2, 8});
  CHECK(std::abs(lb_martingale_sequence(ws, 2.0).linear() - std::sqrt(8.0)) < 1e-12);
  CHECK(std::abs(lb_martingale_sequence(linear({8, 2}), 2.0).linear() - 4.0) < 1e-12);
  CHECK(std::abs(lb_martingale_order(ws, 2.0).linear() - std::sqrt(8.0)) < 1e-12);
  // Constant weights: the i-th term is c * alpha^(-1/i), largest at i = N.
  CHECK(lb_martingale_sequence(linear({6, 6, 6}), 2.0).linear() == doctest::Approx(6.0 * std::pow(2.0, -1.0 / 3.0)));

  SUBCASE("order statistics against direct evaluation") {
    const auto eq = linear({1.5, 1.5, 1.5, 1.5, 1.5});
    double best = 0.0;
    for (int i = 1; i <= 5; ++i) {
      // prod_{j<=i} w_(j) / (alpha * C(5, i)^i), then the i-th root
      const double c = std::tgamma(6.0) / (std::tgamma(i + 1.0) * std::tgamma(6.0 - i));
      best = std::max(best, std::pow(std::pow(1.5, i) / (2.0 * std::pow(c, i)), 1.0 / i));
    }
    CHECK(lb_martingale_order(eq, 2.0).linear() == doctest::Approx(best).epsilon(1e-12));
  }
  SUBCASE("single-division form") {
    // i = 1: 8 / (2 * 2) = 2; i = 2: sqrt(16 / 2) = sqrt 8.
    CHECK(lb_martingale_order(linear({2, 8, 1}), 2.0, OrderStatForm::single_division).linear() >=
          lb_martingale_order(linear({2, 8, 1}), 2.0, OrderStatForm::per_term).linear());
  }
  SUBCASE("zero weights") {
    CHECK(lb_martingale_sequence(linear({0, 4}), 2.0).is_zero());
    CHECK(lb_martingale_sequence(linear({4, 0}), 2.0).linear() == doctest::Approx(2.0));
    CHECK(lb_martingale_order(linear({0, 4}), 2.0).linear() == doctest::Approx(1.0));
  }
}

TEST_CASE("N = 1 identities are bit-exact") {
  for (double w : {0.001, 0.37, 1.0, 5.25, 1e-200}) {
    const LogProb lw = LogProb::from_linear(w);
    const std::vector<LogProb> one{lw};
    const LogProb ref = lb_min(lw, 2.0);
    RngStream rng(3);
    CHECK(lb_average(one, 2.0).log() == ref.log());
    CHECK(lb_max(one, 2.0).bound.log() == ref.log());
    CHECK(lb_martingale_permutation(one, 2.0, rng).log() == ref.log());
    CHECK(lb_martingale_order(one, 2.0).log() == ref.log());
  }
}

TEST_CASE("binomial coefficients") {
  CHECK(log_binomial(10, 0) == 0.0);
  CHECK(log_binomial(10, 10) == 0.0);
  CHECK(std::exp(log_binomial(10, 3)) == doctest::Approx(120.0));
}

TEST_CASE("sample-size calculators") {
  CHECK(required_samples_dagum(0.5, 0.5, 0.05) == 119);
  CHECK(required_samples_cheng(0.5, 0.5, 0.05) == 69);
  CHECK(required_samples_dagum(0.25, 0.5, 0.05) >= 2 * required_samples_dagum(0.5, 0.5, 0.05) - 1);
  CHECK(required_samples_dagum(1, 1, 0.5) < required_samples_dagum(1, 1, 0.01));
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j) {
      const double m = 0.1 * i;
      const double eps = 0.1 * j;
      CHECK(required_samples_cheng(m, eps, 0.05) <= required_samples_dagum(m, eps, 0.05));
    }
  CHECK_THROWS_AS(required_samples_dagum(0.0, 0.5, 0.05), InvalidArgument);
  CHECK_THROWS_AS(required_samples_cheng(0.5, 0.0, 0.05), InvalidArgument);
  CHECK_THROWS_AS(required_samples_cheng(0.5, 0.5, 1.0), InvalidArgument);
}

TEST_CASE("log-relative error") {
  const LogProb exact = LogProb::from_linear(2.8e-13);
  CHECK(log_relative_error(exact, LogProb::from_linear(1.1e-13)) == doctest::Approx(0.0323).epsilon(0.0005 / 0.0323));
  CHECK(log_relative_error(exact, exact) == 0.0);
  CHECK(log_relative_error(exact, LogProb::from_linear(1.1e-13), 10.0) ==
        doctest::Approx(log_relative_error(exact, LogProb::from_linear(1.1e-13))).epsilon(1e-12));
  CHECK(log_relative_error(LogProb::from_log(-30.0), LogProb::from_log(-31.0)) == doctest::Approx(1.0 / 30.0));
  CHECK_THROWS_AS(log_relative_error(LogProb::one(), exact), InvalidArgument);
  CHECK_THROWS_AS(log_relative_error(exact, LogProb::zero()), InvalidArgument);
}

TEST_CASE("run_markov_lb") {
  const BoundParams p{2.0, 7, 50, Heuristic::average};
  SUBCASE("deterministic for a fixed seed") {
    const LowerBoundResult a = run_markov_lb(two_point(), p, RngStream(11));
    const LowerBoundResult b = run_markov_lb(two_point(), p, RngStream(11));
    CHECK(a.log_bound == b.log_bound);
    CHECK(a.per_iteration == b.per_iteration);
    CHECK(a.confidence == 0.9921875);
    CHECK(a.repetitions_completed == 7);
    CHECK(a.samples_used == 350);
    CHECK(a.log_bound.linear() <= 2.0);
  }
  SUBCASE("workers give the same result") {
    auto factory = [] { return two_point(); };
    const LowerBoundResult one = run_markov_lb(factory, p, RngStream(4), RunOptions{std::nullopt, 1});
    const LowerBoundResult many = run_markov_lb(factory, p, RngStream(4), RunOptions{std::nullopt, 3});
    CHECK(one.per_iteration == many.per_iteration);
  }
  SUBCASE("all-zero repetition gives a trivial bound") {
    const auto zero = [](RngStream&) -> WeightedSample {
      WeightedSample s;
      s.log_weight = LogProb::zero();
      return s;
    };
    const LowerBoundResult r = run_markov_lb(zero, p, RngStream(1));
    CHECK(r.trivial());
  }
  SUBCASE("expired deadline completes nothing") {
    const LowerBoundResult r = run_markov_lb(two_point(), p, RngStream(1),
                                             RunOptions{std::chrono::steady_clock::now(), 1});
    CHECK(r.timed_out);
    CHECK(r.repetitions_completed == 0);
    CHECK(r.confidence == 0.0);
    CHECK(r.trivial());
  }
  SUBCASE("max reports beta") {
    const LowerBoundResult r = run_markov_lb(two_point(), BoundParams{2.0, 3, 100, Heuristic::max}, RngStream(1));
    REQUIRE(r.beta);
    CHECK(*r.beta == doctest::Approx(144.77).epsilon(1e-4));
  }
}
