#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "log_prob.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace mlb {

// Q_i(X_i | Y_i): rows over context configurations (row-major over the
// context variables in the order listed), variable value fastest.
struct ConditionalTable {
  int variable = 0;
  int cardinality = 0;
  std::vector<int> context;
  std::vector<int> context_cards;
  std::vector<double> probs;

  std::size_t row_count() const { return probs.size() / static_cast<std::size_t>(cardinality); }
  std::size_t row_index(const Assignment& x) const;
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(probs).subspan(r * static_cast<std::size_t>(cardinality),
                                                  static_cast<std::size_t>(cardinality));
  }
};

// Product-form proposal Q(x) = prod_i Q_i(x_i | y_i) along a fixed ordering of
// the non-clamped variables.
class FactoredProposal {
 public:
  // `clamps` fixes the evidence variables; `tables` lists one conditional per
  // unclamped variable in sampling order. Each context must consist of
  // variables earlier in the order. `covering` asserts that Q is positive
  // wherever the target is.
  FactoredProposal(Assignment clamps, std::vector<ConditionalTable> tables, bool covering);
  // Marks the proposal covering iff every entry is strictly positive.
  FactoredProposal(Assignment clamps, std::vector<ConditionalTable> tables);

  std::size_t num_vars() const { return clamps_.size(); }
  std::size_t size() const { return tables_.size(); }
  const ConditionalTable& table(std::size_t position) const { return tables_[position]; }
  std::span<const ConditionalTable> tables() const { return tables_; }
  std::span<const int> ordering() const { return ordering_; }
  const Assignment& clamps() const { return clamps_; }
  bool covering() const { return covering_; }
  // Largest context size, recorded as metadata.
  std::size_t context_bound() const;

 private:
  Assignment clamps_;
  std::vector<ConditionalTable> tables_;
  std::vector<int> ordering_;
  bool covering_;
};

// Likelihood-weighting proposal: each unobserved variable's CPT with evidence
// parents clamped, in topological order.
FactoredProposal build_prior_proposal(const BeliefNetwork& bn, const Evidence& e);

struct BpOptions {
  int iterations = 10;
  double damping = 0.5;
  double floor = 1e-6;
};

// Loopy sum-product over the evidence-reduced CPT factors; Q_i is the family
// belief of X_i conditioned on its unobserved parents, floored and renormalized.
FactoredProposal build_bp_proposal(const BeliefNetwork& bn, const Evidence& e,
                                   const BpOptions& options = {});

// Inverse-CDF draw from an unnormalized row. Zero entries are never chosen.
// Requires a positive row total.
int draw_from_row(std::span<const double> row, double u);

struct OrderedDraw {
  Assignment x;  // includes the clamped evidence values
  LogProb log_density;
};

OrderedDraw sample_ordered(const FactoredProposal& q, RngStream& rng);

// sum_i log Q_i(x_i | y_i). x must assign every unclamped variable.
LogProb proposal_log_density(const FactoredProposal& q, const Assignment& x);

}  // namespace mlb
