#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "constraints.hpp"
#include "error.hpp"
#include "fixtures.hpp"
#include "generator.hpp"
#include "oracles.hpp"

using namespace mlb;

namespace {

Assignment partial(std::size_t n, std::initializer_list<std::pair<int, int>> values) {
  Assignment x(n);
  for (const auto& [v, a] : values) x.set(v, a);
  return x;
}

ConstraintNetwork two_binary(std::vector<std::vector<int>> allowed) {
  return ConstraintNetwork({2, 2}, {Relation({0, 1}, {2, 2}, allowed)});
}

}  // namespace

TEST_CASE("relations come from the CPT zeros") {
  SUBCASE("zero entry gives the allowed-tuple set") {
    const BeliefNetwork bn = fixtures::net(fixtures::kZeroEntry);
    const ConstraintNetwork cn = extract_constraints(bn, Evidence());
    REQUIRE(cn.relations().size() == 1);
    const Relation& r = cn.relations()[0];
    CHECK(std::vector<int>(r.scope().begin(), r.scope().end()) == std::vector<int>{0, 1});
    CHECK(r.tuples() == std::vector<std::vector<int>>{{0, 0}, {1, 0}, {1, 1}});
  }
  SUBCASE("positive network without evidence has no relations") {
    const GeneratedInstance inst = generate_random_network(10, 3, 0.0, 0, 2);
    CHECK(extract_constraints(inst.network, inst.evidence).relations().empty());
  }
  SUBCASE("evidence becomes a unary clamp") {
    const BeliefNetwork bn = fixtures::net(fixtures::kDiamond);
    const ConstraintNetwork cn = extract_constraints(bn, Evidence(bn, {{3, 0}}));
    REQUIRE(cn.relations().size() == 1);
    const Relation& r = cn.relations()[0];
    CHECK(std::vector<int>(r.scope().begin(), r.scope().end()) == std::vector<int>{3});
    CHECK(r.tuples() == std::vector<std::vector<int>>{{0}});
  }
}

TEST_CASE("relation encoding") {
  const Relation r({2, 0}, {3, 2}, std::vector<std::vector<int>>{{2, 1}, {0, 0}});
  CHECK(r.allowed_count() == 2);
  CHECK(r.allows(std::vector<int>{2, 1}));
  CHECK_FALSE(r.allows(std::vector<int>{1, 1}));
  CHECK(r.allows(partial(3, {{0, 1}, {2, 2}})));
  CHECK_THROWS_AS(Relation({0}, {2}, std::vector<std::vector<int>>{{2}}), InvalidArgument);
  CHECK(Relation({0}, {2}, std::vector<std::vector<int>>{}).empty());
}

TEST_CASE("consistency of partial assignments") {
  const BeliefNetwork bn = fixtures::net(fixtures::kZeroEntry);
  const ConstraintNetwork cn = extract_constraints(bn, Evidence());
  CHECK(consistent_partial(cn, Assignment(2)));
  CHECK_FALSE(consistent_partial(cn, partial(2, {{0, 0}, {1, 1}})));
  CHECK(consistent_partial(cn, partial(2, {{0, 0}})));
  CHECK(cn.consistent_after(partial(2, {{0, 1}, {1, 1}}), 1));
  CHECK_FALSE(cn.consistent_after(partial(2, {{0, 0}, {1, 1}}), 1));
}

TEST_CASE("extendability") {
  SUBCASE("no relations") {
    const ConstraintNetwork cn({2, 3, 2}, {});
    CHECK(is_extendable(cn, partial(3, {{1, 2}})));
    CHECK(is_extendable(cn, Assignment(3)));
  }
  SUBCASE("forbid (0,0)") {
    const ConstraintNetwork cn = two_binary({{0, 1}, {1, 0}, {1, 1}});
    CHECK(is_extendable(cn, partial(2, {{0, 0}})));
    CHECK_FALSE(is_extendable(cn, partial(2, {{0, 0}, {1, 0}})));
  }
  SUBCASE("only (1,1) allowed") {
    const ConstraintNetwork cn = two_binary({{1, 1}});
    CHECK_FALSE(is_extendable(cn, partial(2, {{0, 0}})));
    CHECK(is_extendable(cn, partial(2, {{1, 1}})));
  }
  SUBCASE("empty relation") {
    const ConstraintNetwork cn = two_binary({});
    CHECK(cn.has_empty_relation());
    CHECK_FALSE(is_extendable(cn, Assignment(2)));
  }
  SUBCASE("matches enumeration on random deterministic networks") {
    std::mt19937 gen(17);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const GeneratedInstance inst = generate_random_network(8, 3, 0.5, 2, seed);
      const ConstraintNetwork cn = extract_constraints(inst.network, inst.evidence);
      ExtendabilityOracle probe(cn);
      for (int t = 0; t < 25; ++t) {
        Assignment x = inst.evidence.clamp(inst.network.size());
        for (std::size_t v = 0; v < inst.network.size(); ++v) {
          if (x.is_set(int(v)) || gen() % 2) continue;
          x.set(int(v), int(gen() % std::uint32_t(inst.network.cardinality(int(v)))));
        }
        CHECK(probe.is_extendable(x) == oracle::extendable(inst.network, inst.evidence, x));
      }
      CHECK(probe.probes() == 25);
    }
  }
  SUBCASE("memo answers repeat queries and clears") {
    const ConstraintNetwork cn = two_binary({{0, 1}, {1, 0}, {1, 1}});
    ExtendabilityOracle oracle(cn, {1, 0});
    const Assignment x = partial(2, {{1, 0}});
    CHECK(oracle.is_extendable(x));
    CHECK(oracle.is_extendable(x));
    CHECK(oracle.probes() == 2);
    oracle.clear_cache();
    oracle.reset_probes();
    CHECK(oracle.probes() == 0);
    CHECK(oracle.is_extendable(x));
  }
}

TEST_CASE("DIMACS export") {
  const ConstraintNetwork cn = two_binary({{0, 1}, {1, 0}, {1, 1}});
  const std::string cnf = export_dimacs(cn);
  std::istringstream in(cnf);
  std::string p, kind;
  int vars = 0, clauses = 0;
  std::string line;
  while (std::getline(in, line) && line.rfind("p ", 0) != 0) {}
  std::istringstream header(line);
  header >> p >> kind >> vars >> clauses;
  CHECK(kind == "cnf");
  CHECK(vars == 4);
  // Two at-least-one, two at-most-one and one nogood.
  CHECK(clauses == 5);
  CHECK(cnf.find("-1 -3 0") != std::string::npos);
}
