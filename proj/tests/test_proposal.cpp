#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "error.hpp"
#include "fixtures.hpp"
#include "generator.hpp"
#include "oracles.hpp"
#include "proposal.hpp"
#include "rng.hpp"

using namespace mlb;

namespace {

std::vector<int> to_vector(const Assignment& x) { return {x.values().begin(), x.values().end()}; }

FactoredProposal single(std::vector<double> probs) {
  ConditionalTable t{0, static_cast<int>(probs.size()), {}, {}, std::move(probs)};
  return FactoredProposal(Assignment(1), {t});
}

}  // namespace

TEST_CASE("prior proposal") {
  SUBCASE("parentless variable copies its prior") {
    const BeliefNetwork bn = parse_model("BAYES\n1\n2\n1\n1 0\n2 0.7 0.3\n");
    const FactoredProposal q = build_prior_proposal(bn, Evidence());
    REQUIRE(q.size() == 1);
    CHECK(q.table(0).probs == std::vector<double>{0.7, 0.3});
    CHECK(q.covering());
  }
  SUBCASE("chain with observed child samples only the root") {
    const BeliefNetwork bn = fixtures::net(fixtures::kChain);
    const Evidence e(bn, {{1, 1}});
    const FactoredProposal q = build_prior_proposal(bn, e);
    REQUIRE(q.size() == 1);
    CHECK(q.table(0).variable == 0);
    CHECK(q.table(0).probs == std::vector<double>{0.6, 0.4});
    CHECK(q.clamps()[1] == 1);
    CHECK_FALSE(q.clamps().is_set(0));
  }
  SUBCASE("evidence parents are clamped out of the context") {
    const BeliefNetwork bn = fixtures::net(fixtures::kDiamond);
    const Evidence e(bn, {{1, 0}});
    const FactoredProposal q = build_prior_proposal(bn, e);
    REQUIRE(q.size() == 3);
    const ConditionalTable& d = q.table(2);
    CHECK(d.variable == 3);
    CHECK(d.context == std::vector<int>{2});
    CHECK(d.probs == std::vector<double>{0.9, 0.1, 0.5, 0.5});
  }
}

TEST_CASE("factored proposal validation") {
  CHECK_THROWS_AS(single({0.5, 0.4}), InvalidArgument);
  CHECK_THROWS_AS(single({1.2, -0.2}), InvalidArgument);
  // Context variable must come earlier in the ordering.
  ConditionalTable a{0, 2, {1}, {2}, {0.5, 0.5, 0.5, 0.5}};
  ConditionalTable b{1, 2, {}, {}, {0.5, 0.5}};
  CHECK_THROWS_AS(FactoredProposal(Assignment(2), {a, b}), InvalidArgument);
  CHECK_NOTHROW(FactoredProposal(Assignment(2), {b, a}));
  CHECK_FALSE(single({1.0, 0.0}).covering());
  CHECK(single({0.9, 0.1}).covering());
}

TEST_CASE("belief-propagation proposal") {
  SUBCASE("exact on a tree") {
    // 0 -> 1, 0 -> 2, 2 -> 3 with 3 observed.
    const BeliefNetwork bn = parse_model(
        "BAYES\n4\n2 3 2 2\n4\n1 0\n2 0 1\n2 0 2\n2 2 3\n"
        "2 0.3 0.7\n6 0.2 0.5 0.3 0.6 0.3 0.1\n4 0.9 0.1 0.25 0.75\n4 0.8 0.2 0.35 0.65\n");
    const Evidence e(bn, {{3, 1}});
    const FactoredProposal q = build_bp_proposal(bn, e, BpOptions{30, 0.0, 1e-12});
    for (const ConditionalTable& t : q.tables()) {
      oracle::for_each_assignment({2, 3, 2, 2}, [&](const std::vector<int>& x) {
        if (x[3] != 1) return;
        const double exact = oracle::exact_conditional(bn, e, t.variable, t.context, x);
        CHECK(oracle::conditional(t, x) == doctest::Approx(exact).epsilon(1e-6));
      });
    }
  }
  SUBCASE("floor keeps every entry positive") {
    const BeliefNetwork bn = fixtures::net(fixtures::kZeroEntry);
    const double floor = 1e-3;
    const FactoredProposal q = build_bp_proposal(bn, Evidence(), BpOptions{10, 0.5, floor});
    CHECK(q.covering());
    for (const ConditionalTable& t : q.tables())
      for (double p : t.probs) CHECK(p >= floor / (1.0 + t.cardinality * floor) - 1e-15);
  }
  SUBCASE("loopy networks give normalized rows") {
    const GeneratedInstance inst = generate_random_network(15, 3, 0.3, 4, 8);
    const FactoredProposal q = build_bp_proposal(inst.network, inst.evidence);
    for (const ConditionalTable& t : q.tables())
      for (std::size_t r = 0; r < t.row_count(); ++r) {
        double s = 0.0;
        for (double p : t.row(r)) s += p;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
      }
  }
  SUBCASE("invalid options") {
    const BeliefNetwork bn = fixtures::net(fixtures::kChain);
    CHECK_THROWS_AS(build_bp_proposal(bn, Evidence(), BpOptions{0, 0.5, 1e-6}), InvalidArgument);
    CHECK_THROWS_AS(build_bp_proposal(bn, Evidence(), BpOptions{5, 1.0, 1e-6}), InvalidArgument);
    CHECK_THROWS_AS(build_bp_proposal(bn, Evidence(), BpOptions{5, 0.5, 0.0}), InvalidArgument);
  }
}

TEST_CASE("ordered sampling") {
  SUBCASE("deterministic conditional") {
    const FactoredProposal q = single({0.0, 1.0, 0.0});
    RngStream rng(1);
    for (int i = 0; i < 20; ++i) {
      const OrderedDraw d = sample_ordered(q, rng);
      CHECK(d.x[0] == 1);
      CHECK(d.log_density.log() == 0.0);
    }
  }
  SUBCASE("empirical frequency") {
    const FactoredProposal q = single({0.7, 0.3});
    RngStream rng(2024);
    int ones = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ones += sample_ordered(q, rng).x[0];
    CHECK(std::abs(ones / double(draws) - 0.3) <= 0.015);
  }
  SUBCASE("fixed seed repeats the sequence") {
    const GeneratedInstance inst = generate_random_network(10, 3, 0.2, 2, 4);
    const FactoredProposal q = build_prior_proposal(inst.network, inst.evidence);
    RngStream a(9);
    RngStream b(9);
    for (int i = 0; i < 50; ++i) CHECK(sample_ordered(q, a).x == sample_ordered(q, b).x);
  }
  SUBCASE("returned density matches the density function and the oracle") {
    const GeneratedInstance inst = generate_random_network(8, 3, 0.3, 2, 11);
    const FactoredProposal q = build_prior_proposal(inst.network, inst.evidence);
    RngStream rng(3);
    for (int i = 0; i < 50; ++i) {
      const OrderedDraw d = sample_ordered(q, rng);
      CHECK(d.log_density == proposal_log_density(q, d.x));
      CHECK(d.log_density.linear() == doctest::Approx(oracle::proposal_density(q, to_vector(d.x))).epsilon(1e-12));
      for (const auto& [var, val] : inst.evidence.pairs()) CHECK(d.x[var] == val);
    }
  }
  SUBCASE("uniform over three binary variables") {
    std::vector<ConditionalTable> ts;
    for (int v = 0; v < 3; ++v) ts.push_back(ConditionalTable{v, 2, {}, {}, {0.5, 0.5}});
    const FactoredProposal q(Assignment(3), ts);
    CHECK(proposal_log_density(q, Assignment(std::vector<int>{1, 0, 1})).log() ==
          doctest::Approx(std::log(1.0 / 8.0)));
  }
}

TEST_CASE("draw_from_row never returns a zero entry") {
  const std::vector<double> row = {0.0, 0.5, 0.0, 0.5, 0.0};
  for (double u : {0.0, 0.25, 0.4999, 0.5, 0.75, 0.999999999}) {
    const int v = draw_from_row(row, u);
    CHECK(row[static_cast<std::size_t>(v)] > 0.0);
  }
  CHECK(draw_from_row(row, 0.1) == 1);
  CHECK(draw_from_row(row, 0.9) == 3);
}
