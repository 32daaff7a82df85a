#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "log_prob.hpp"

namespace mlb {

// Row sums of parsed CPTs and of proposal conditionals must be within this.
inline constexpr double kRowSumTolerance = 1e-6;

// Per-variable optional values. Unset entries hold kUnset.
class Assignment {
 public:
  static constexpr int kUnset = -1;

  Assignment() = default;
  explicit Assignment(std::size_t num_vars) : values_(num_vars, kUnset) {}
  explicit Assignment(std::vector<int> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool is_set(int var) const { return values_[static_cast<std::size_t>(var)] != kUnset; }
  int operator[](int var) const { return values_[static_cast<std::size_t>(var)]; }
  void set(int var, int value) { values_[static_cast<std::size_t>(var)] = value; }
  void unset(int var) { values_[static_cast<std::size_t>(var)] = kUnset; }
  bool full() const;
  std::span<const int> values() const { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> values_;
};

// P(child | parents). The table is row-major over parent configurations in
// the order listed, with the child value varying fastest.
struct Cpt {
  int child = 0;
  std::vector<int> parents;
  std::vector<double> table;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

class BeliefNetwork {
 public:
  // Validates cardinalities, scopes, table sizes, entry ranges, row sums and
  // acyclicity. CPTs may be listed in any order; each variable needs exactly one.
  BeliefNetwork(std::vector<int> cardinalities, std::vector<Cpt> cpts);

  std::size_t size() const { return cards_.size(); }
  int cardinality(int var) const { return cards_[static_cast<std::size_t>(var)]; }
  std::span<const int> cardinalities() const { return cards_; }
  int max_cardinality() const;

  const Cpt& cpt(int var) const { return cpts_[static_cast<std::size_t>(var)]; }
  std::span<const Cpt> cpts() const { return cpts_; }

  // Parents before children, ties broken by lowest index.
  std::span<const int> topological_order() const { return topo_; }

  // Index of the row of cpt(var) selected by the parent values in x.
  std::size_t row_index(int var, const Assignment& x) const;
  double probability(int var, const Assignment& x) const;

  friend bool operator==(const BeliefNetwork& a, const BeliefNetwork& b) {
    return a.cards_ == b.cards_ && a.cpts_ == b.cpts_;
  }

 private:
  std::vector<int> cards_;
  std::vector<Cpt> cpts_;
  std::vector<int> topo_;
};

class Evidence {
 public:
  Evidence() = default;
  // Throws InvalidArgument on out-of-range variables or values and on
  // duplicate variables.
  Evidence(const BeliefNetwork& bn, std::vector<std::pair<int, int>> pairs);

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(int var) const;
  int value(int var) const;
  // Sorted by variable index.
  std::span<const std::pair<int, int>> pairs() const { return pairs_; }
  // Assignment over num_vars variables with only the evidence set.
  Assignment clamp(std::size_t num_vars) const;

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::vector<std::pair<int, int>> pairs_;
};

BeliefNetwork parse_model(std::string_view text);
BeliefNetwork load_model(const std::string& path);
std::string serialize_model(const BeliefNetwork& bn);

Evidence parse_evidence(const BeliefNetwork& bn, std::string_view text);
Evidence load_evidence(const BeliefNetwork& bn, const std::string& path);
std::string serialize_evidence(const Evidence& e);

// log f(x) = sum_j log P(x_j | x_pa(j)). x must be full and agree with e.
LogProb log_joint(const BeliefNetwork& bn, const Evidence& e, const Assignment& x);

inline std::span<const int> topological_order(const BeliefNetwork& bn) {
  return bn.topological_order();
}

// A CPT with evidence variables clamped: context holds the non-evidence
// parents in CPT order and the table keeps the parent-major, child-fastest
// layout. When the child itself is observed, only its observed column is kept
// and `child_observed` is set.
struct ReducedCpt {
  int child = 0;
  bool child_observed = false;
  std::vector<int> context;
  std::vector<double> table;
};

ReducedCpt reduce_cpt(const BeliefNetwork& bn, const Evidence& e, int var);

// Non-evidence variables in topological order.
std::vector<int> non_evidence_variables(const BeliefNetwork& bn, const Evidence& e);

}  // namespace mlb
