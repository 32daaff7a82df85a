#pragma once

#include <optional>

#include "constraints.hpp"
#include "log_prob.hpp"
#include "model.hpp"
#include "proposal.hpp"
#include "rng.hpp"

namespace mlb {

enum class DensityKind { plain, backtrack_free };

struct WeightedSample {
  Assignment x;
  LogProb log_f;
  LogProb log_density;
  LogProb log_weight;  // log_f - log_density
  DensityKind density_kind = DensityKind::plain;
};

// Backtracking search over the proposal's ordering, guided by Q: a value that
// violates a relation is zeroed in its level's working distribution and
// redrawn; an exhausted level retracts the previous variable. Returns a full
// assignment satisfying every relation, or throws Unsatisfiable.
Assignment sample_search(const FactoredProposal& q, const ConstraintNetwork& cn, RngStream& rng);

// log Q^R(x): each factor Q_i(x_i | .) is renormalized over the values whose
// prefix is extendable to a solution. The sampled value itself is not probed.
LogProb backtrack_free_log_density(const FactoredProposal& q, const ConstraintNetwork& cn,
                                   const Assignment& x, ExtendabilityOracle& oracle);
LogProb backtrack_free_log_density(const FactoredProposal& q, const ConstraintNetwork& cn,
                                   const Assignment& x);

// Plain importance sampling without constraints, SampleSearch with Q^R when a
// constraint network is given. Holds a worker-local oracle cache.
class WeightedSampler {
 public:
  WeightedSampler(const BeliefNetwork& bn, const Evidence& e, const FactoredProposal& q,
                  const ConstraintNetwork* cn);

  WeightedSample draw(RngStream& rng);
  // Extendability probes made by the last draw.
  std::uint64_t last_probe_count() const { return last_probes_; }

 private:
  const BeliefNetwork* bn_;
  const Evidence* e_;
  const FactoredProposal* q_;
  const ConstraintNetwork* cn_;
  std::optional<ExtendabilityOracle> oracle_;
  std::uint64_t last_probes_ = 0;
};

WeightedSample draw_weighted_sample(const BeliefNetwork& bn, const Evidence& e,
                                    const FactoredProposal& q, const ConstraintNetwork* cn,
                                    RngStream& rng);

}  // namespace mlb
