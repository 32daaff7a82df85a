#include "samplesearch.hpp"

#include <cmath>

namespace mlb {

Assignment sample_search(const FactoredProposal& q, const ConstraintNetwork& cn, RngStream& rng) {
  if (cn.num_vars() != q.num_vars()) throw InvalidArgument("proposal and constraints disagree on variables");
  if (cn.has_empty_relation()) throw Unsatisfiable("a relation allows no tuple");
  Assignment x = q.clamps();
  if (!consistent_partial(cn, x)) throw Unsatisfiable("evidence violates the constraints");

  const std::size_t n = q.size();
  if (n == 0) return x;
  // Level-local working copies Q'_i, refreshed from q whenever a level is entered.
  std::vector<std::vector<double>> working(n);
  auto enter = [&](std::size_t i) {
    const ConditionalTable& t = q.table(i);
    const auto row = t.row(t.row_index(x));
    working[i].assign(row.begin(), row.end());
  };

  std::size_t i = 0;
  enter(0);
  while (i < n) {
    std::vector<double>& w = working[i];
    const int var = q.table(i).variable;
    bool live = false;
    for (double p : w) live = live || p > 0.0;
    if (live) {
      const int v = draw_from_row(w, rng.uniform());
      x.set(var, v);
      if (!cn.consistent_after(x, var)) {
        w[static_cast<std::size_t>(v)] = 0.0;
        x.unset(var);
        continue;
      }
      if (++i < n) enter(i);
    } else {
      x.unset(var);
      if (i == 0) throw Unsatisfiable("search exhausted the first variable");
      --i;
      const int prev = q.table(i).variable;
      working[i][static_cast<std::size_t>(x[prev])] = 0.0;
      x.unset(prev);
    }
  }
  return x;
}

LogProb backtrack_free_log_density(const FactoredProposal& q, const ConstraintNetwork& cn,
                                   const Assignment& x, ExtendabilityOracle& oracle) {
  if (x.size() != q.num_vars() || !x.full()) throw InvalidArgument("Q^R needs a full assignment");
  if (!consistent_partial(cn, x)) throw InvalidArgument("assignment violates a relation");

  Assignment prefix = q.clamps();
  double log_density = 0.0;
  for (const ConditionalTable& t : q.tables()) {
    const auto row = t.row(t.row_index(x));
    const int chosen = x[t.variable];
    // Renormalize over the live values. With no dead value the factor is
    // left untouched, so an unconstrained level matches Q bit for bit.
    double live_mass = row[static_cast<std::size_t>(chosen)];
    bool any_dead = false;
    for (int a = 0; a < t.cardinality; ++a) {
      const double p = row[static_cast<std::size_t>(a)];
      if (a == chosen || p == 0.0) continue;
      prefix.set(t.variable, a);
      if (oracle.is_extendable(prefix)) {
        live_mass += p;
      } else {
        any_dead = true;
      }
    }
    prefix.set(t.variable, chosen);
    const double p = row[static_cast<std::size_t>(chosen)];
    if (p == 0.0) return LogProb::zero();
    log_density += std::log(p);
    if (any_dead) log_density -= std::log(live_mass);
  }
  return LogProb::from_log(log_density);
}

LogProb backtrack_free_log_density(const FactoredProposal& q, const ConstraintNetwork& cn,
                                   const Assignment& x) {
  ExtendabilityOracle oracle(cn, std::vector<int>(q.ordering().begin(), q.ordering().end()));
  return backtrack_free_log_density(q, cn, x, oracle);
}

WeightedSampler::WeightedSampler(const BeliefNetwork& bn, const Evidence& e,
                                 const FactoredProposal& q, const ConstraintNetwork* cn)
    : bn_(&bn), e_(&e), q_(&q), cn_(cn) {
  if (q.num_vars() != bn.size()) throw InvalidArgument("proposal does not match the network");
  if (cn_) {
    if (!q.covering())
      throw InvalidArgument("SampleSearch requires a covering proposal");
    oracle_.emplace(*cn_, std::vector<int>(q.ordering().begin(), q.ordering().end()));
  }
}

WeightedSample WeightedSampler::draw(RngStream& rng) {
  WeightedSample s;
  last_probes_ = 0;
  if (!cn_) {
    OrderedDraw d = sample_ordered(*q_, rng);
    s.x = std::move(d.x);
    s.log_density = d.log_density;
    s.density_kind = DensityKind::plain;
  } else {
    s.x = sample_search(*q_, *cn_, rng);
    oracle_->reset_probes();
    oracle_->clear_cache();
    s.log_density = backtrack_free_log_density(*q_, *cn_, s.x, *oracle_);
    last_probes_ = oracle_->probes();
    s.density_kind = DensityKind::backtrack_free;
  }
  s.log_f = log_joint(*bn_, *e_, s.x);
  s.log_weight = s.log_f / s.log_density;
  return s;
}

WeightedSample draw_weighted_sample(const BeliefNetwork& bn, const Evidence& e,
                                    const FactoredProposal& q, const ConstraintNetwork* cn,
                                    RngStream& rng) {
  WeightedSampler sampler(bn, e, q, cn);
  return sampler.draw(rng);
}

}  // namespace mlb
