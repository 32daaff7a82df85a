#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "model.hpp"

namespace mlb {

// Allowed tuples over an ordered scope. Tuples are stored mixed-radix
// encoded (last scope variable fastest) in a hash set.
class Relation {
 public:
  Relation(std::vector<int> scope, std::vector<int> scope_cards,
           const std::vector<std::vector<int>>& allowed);
  Relation(std::vector<int> scope, std::vector<int> scope_cards,
           std::unordered_set<std::uint64_t> allowed_codes);

  std::span<const int> scope() const { return scope_; }
  std::span<const int> scope_cards() const { return cards_; }
  bool empty() const { return allowed_.empty(); }
  std::size_t allowed_count() const { return allowed_.size(); }

  std::uint64_t encode(std::span<const int> tuple) const;
  bool allows(std::span<const int> tuple) const { return allowed_.count(encode(tuple)) > 0; }
  // Reads the scope values out of x; every scope variable must be set.
  bool allows(const Assignment& x) const;
  // Sorted lexicographically.
  std::vector<std::vector<int>> tuples() const;

 private:
  std::vector<int> scope_;
  std::vector<int> cards_;
  std::unordered_set<std::uint64_t> allowed_;
};

class ConstraintNetwork {
 public:
  ConstraintNetwork(std::vector<int> cardinalities, std::vector<Relation> relations);

  std::size_t num_vars() const { return cards_.size(); }
  std::span<const int> cardinalities() const { return cards_; }
  std::span<const Relation> relations() const { return relations_; }
  // Indices of relations whose scope contains var.
  std::span<const int> relations_of(int var) const {
    return watch_[static_cast<std::size_t>(var)];
  }
  bool has_empty_relation() const;

  // False iff a relation involving var, with its whole scope assigned in x,
  // rejects the induced tuple.
  bool consistent_after(const Assignment& x, int var) const;

 private:
  std::vector<int> cards_;
  std::vector<Relation> relations_;
  std::vector<std::vector<int>> watch_;
};

// One relation per CPT containing a zero (over parents then child, allowing
// exactly the positive entries) plus a unary clamp per evidence variable.
ConstraintNetwork extract_constraints(const BeliefNetwork& bn, const Evidence& e);

// True iff every relation with a fully assigned scope allows its tuple.
bool consistent_partial(const ConstraintNetwork& cn, const Assignment& x);

// Complete backtracking search with forward checking along a static variable
// order. Answers are memoized by the assignment probed until clear_cache().
class ExtendabilityOracle {
 public:
  // Variables missing from `order` are searched afterwards in index order.
  ExtendabilityOracle(const ConstraintNetwork& cn, std::vector<int> order);
  explicit ExtendabilityOracle(const ConstraintNetwork& cn);

  // True iff some full assignment extending x satisfies every relation.
  bool is_extendable(const Assignment& x);

  void clear_cache() { cache_.clear(); }
  std::uint64_t probes() const { return probes_; }
  void reset_probes() { probes_ = 0; }

 private:
  bool search(Assignment& x, std::vector<std::uint8_t>& live, std::size_t pos);
  bool prune_after_assign(const Assignment& x, std::vector<std::uint8_t>& live, int var) const;
  bool prune_single_unassigned(const Assignment& x, std::vector<std::uint8_t>& live,
                               const Relation& rel) const;

  const ConstraintNetwork* cn_;
  std::vector<int> order_;
  std::vector<std::size_t> offset_;
  std::unordered_map<std::string, bool> cache_;
  std::uint64_t probes_ = 0;
};

bool is_extendable(const ConstraintNetwork& cn, const Assignment& x);

// One-hot DIMACS CNF: literal offset(v) + a + 1 means "variable v takes value a".
std::string export_dimacs(const ConstraintNetwork& cn);

}  // namespace mlb
