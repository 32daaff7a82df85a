#include "proposal.hpp"

#include <algorithm>
#include <cmath>

namespace mlb {

std::size_t ConditionalTable::row_index(const Assignment& x) const {
  std::size_t r = 0;
  for (std::size_t j = 0; j < context.size(); ++j)
    r = r * static_cast<std::size_t>(context_cards[j]) + static_cast<std::size_t>(x[context[j]]);
  return r;
}

FactoredProposal::FactoredProposal(Assignment clamps, std::vector<ConditionalTable> tables,
                                   bool covering)
    : clamps_(std::move(clamps)), tables_(std::move(tables)), covering_(covering) {
  const std::size_t n = clamps_.size();
  std::vector<int> position(n, -1);
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const ConditionalTable& t = tables_[i];
    if (t.variable < 0 || static_cast<std::size_t>(t.variable) >= n)
      throw InvalidArgument("proposal variable out of range");
    if (clamps_.is_set(t.variable))
      throw InvalidArgument("proposal samples clamped variable " + std::to_string(t.variable));
    if (position[static_cast<std::size_t>(t.variable)] >= 0)
      throw InvalidArgument("proposal lists variable " + std::to_string(t.variable) + " twice");
    if (t.cardinality <= 0 || t.context.size() != t.context_cards.size())
      throw InvalidArgument("malformed conditional table");
    std::size_t rows = 1;
    for (std::size_t j = 0; j < t.context.size(); ++j) {
      const int c = t.context[j];
      if (c < 0 || static_cast<std::size_t>(c) >= n || position[static_cast<std::size_t>(c)] < 0)
        throw InvalidArgument("context of variable " + std::to_string(t.variable) +
                              " must precede it in the ordering");
      rows *= static_cast<std::size_t>(t.context_cards[j]);
    }
    if (t.probs.size() != rows * static_cast<std::size_t>(t.cardinality))
      throw InvalidArgument("conditional table size mismatch for variable " +
                            std::to_string(t.variable));
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (double p : t.row(r)) {
        if (!(p >= 0.0)) throw InvalidArgument("negative proposal entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw InvalidArgument("proposal row of variable " + std::to_string(t.variable) +
                              " does not sum to 1");
    }
    position[static_cast<std::size_t>(t.variable)] = static_cast<int>(i);
    ordering_.push_back(t.variable);
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!clamps_.is_set(static_cast<int>(v)) && position[v] < 0)
      throw InvalidArgument("proposal is missing variable " + std::to_string(v));
}

FactoredProposal::FactoredProposal(Assignment clamps, std::vector<ConditionalTable> tables)
    : FactoredProposal(std::move(clamps), tables,
                       std::all_of(tables.begin(), tables.end(), [](const ConditionalTable& t) {
                         return std::all_of(t.probs.begin(), t.probs.end(),
                                            [](double p) { return p > 0.0; });
                       })) {}

std::size_t FactoredProposal::context_bound() const {
  std::size_t c = 0;
  for (const auto& t : tables_) c = std::max(c, t.context.size());
  return c;
}

FactoredProposal build_prior_proposal(const BeliefNetwork& bn, const Evidence& e) {
  std::vector<ConditionalTable> tables;
  for (int v : non_evidence_variables(bn, e)) {
    ReducedCpt r = reduce_cpt(bn, e, v);
    ConditionalTable t;
    t.variable = v;
    t.cardinality = bn.cardinality(v);
    t.context = std::move(r.context);
    for (int c : t.context) t.context_cards.push_back(bn.cardinality(c));
    t.probs = std::move(r.table);
    tables.push_back(std::move(t));
  }
  // Every factor of Q is a factor of f, so f(x) > 0 implies Q(x) > 0.
  return FactoredProposal(e.clamp(bn.size()), std::move(tables), true);
}

int draw_from_row(std::span<const double> row, double u) {
  double total = 0.0;
  for (double p : row) total += p;
  const double target = u * total;
  double cum = 0.0;
  int last = -1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    cum += row[j];
    last = static_cast<int>(j);
    if (target < cum) return last;
  }
  if (last < 0) throw InvalidArgument("draw_from_row: row has no positive mass");
  return last;
}

OrderedDraw sample_ordered(const FactoredProposal& q, RngStream& rng) {
  OrderedDraw out{q.clamps(), LogProb::one()};
  double log_density = 0.0;
  for (const ConditionalTable& t : q.tables()) {
    const auto row = t.row(t.row_index(out.x));
    const int v = draw_from_row(row, rng.uniform());
    out.x.set(t.variable, v);
    log_density += std::log(row[static_cast<std::size_t>(v)]);
  }
  out.log_density = LogProb::from_log(log_density);
  return out;
}

LogProb proposal_log_density(const FactoredProposal& q, const Assignment& x) {
  if (x.size() != q.num_vars()) throw InvalidArgument("assignment size mismatch");
  double log_density = 0.0;
  for (const ConditionalTable& t : q.tables()) {
    if (!x.is_set(t.variable))
      throw InvalidArgument("assignment leaves variable " + std::to_string(t.variable) + " unset");
    const double p = t.row(t.row_index(x))[static_cast<std::size_t>(x[t.variable])];
    if (p == 0.0) return LogProb::zero();
    log_density += std::log(p);
  }
  return LogProb::from_log(log_density);
}

}  // namespace mlb
