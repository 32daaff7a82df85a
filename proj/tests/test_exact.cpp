#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "error.hpp"
#include "exact.hpp"
#include "fixtures.hpp"
#include "generator.hpp"
#include "oracles.hpp"

using namespace mlb;

TEST_CASE("hand-computed probabilities of evidence") {
  SUBCASE("single variable") {
    const BeliefNetwork bn = parse_model("BAYES\n1\n2\n1\n1 0\n2 0.7 0.3\n");
    const Evidence e(bn, {{0, 1}});
    CHECK(brute_force_pe(bn, e).log() == doctest::Approx(std::log(0.3)).epsilon(1e-14));
    CHECK(std::abs(variable_elimination_pe(bn, e).log() - std::log(0.3)) < 1e-12);
  }
  SUBCASE("empty evidence sums to one") {
    const BeliefNetwork bn = fixtures::net(fixtures::kDiamond);
    CHECK(std::abs(brute_force_pe(bn, Evidence()).log()) < 1e-12);
    CHECK(std::abs(variable_elimination_pe(bn, Evidence()).log()) < 1e-12);
  }
  SUBCASE("chain with the child observed") {
    const BeliefNetwork bn = fixtures::net(fixtures::kChain);
    const Evidence e(bn, {{1, 1}});
    CHECK(std::abs(brute_force_pe(bn, e).log() - std::log(0.48)) < 1e-12);
    CHECK(std::abs(variable_elimination_pe(bn, e).log() - std::log(0.48)) < 1e-12);
  }
}

TEST_CASE("variable elimination agrees with enumeration on random networks") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GeneratedInstance inst = generate_random_network(12, 3, 0.2, 3, seed);
    const double truth = std::log(oracle::probability_of_evidence(inst.network, inst.evidence));
    const double bf = brute_force_pe(inst.network, inst.evidence).log();
    const double ve = variable_elimination_pe(inst.network, inst.evidence).log();
    CHECK(std::abs(bf - truth) < 1e-9 * std::abs(truth) + 1e-12);
    CHECK(std::abs(ve - bf) < 1e-9 * std::abs(bf) + 1e-12);
  }
}

TEST_CASE("zero-probability evidence gives log 0 in both oracles") {
  const BeliefNetwork bn = fixtures::net(fixtures::kZeroEntry);
  const Evidence e(bn, {{0, 0}, {1, 1}});
  CHECK(brute_force_pe(bn, e).is_zero());
  CHECK(variable_elimination_pe(bn, e).is_zero());
}

TEST_CASE("every elimination order gives the same answer") {
  const BeliefNetwork bn = fixtures::net(fixtures::kDiamond);
  const Evidence e(bn, {{3, 1}});
  const double ref = brute_force_pe(bn, e).log();
  std::vector<int> order = {0, 1, 2};
  do {
    const EliminationOrder o(bn, e, order);
    CHECK(std::abs(variable_elimination_pe(bn, e, o).log() - ref) < 1e-12);
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK_THROWS_AS(EliminationOrder(bn, e, {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(EliminationOrder(bn, e, {0, 1, 3}), InvalidArgument);
  CHECK_THROWS_AS(EliminationOrder(bn, e, {0, 1, 1}), InvalidArgument);
}

TEST_CASE("min-fill order covers the non-evidence variables") {
  const GeneratedInstance inst = generate_random_network(14, 2, 0.1, 4, 3);
  const EliminationOrder o = min_fill_order(inst.network, inst.evidence);
  std::vector<int> got(o.variables().begin(), o.variables().end());
  std::sort(got.begin(), got.end());
  std::vector<int> want = non_evidence_variables(inst.network, inst.evidence);
  std::sort(want.begin(), want.end());
  CHECK(got == want);
}

TEST_CASE("caps") {
  const GeneratedInstance inst = generate_random_network(14, 2, 0.0, 0, 1);
  CHECK_THROWS_AS(brute_force_pe(inst.network, inst.evidence, 1000), CapExceeded);
  CHECK_THROWS_AS(variable_elimination_pe(inst.network, inst.evidence, 2), CapExceeded);
  try {
    brute_force_pe(inst.network, inst.evidence, 1000);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cap_exceeded);
  }
}
