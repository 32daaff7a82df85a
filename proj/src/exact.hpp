#pragma once

#include <cstdint>
#include <vector>

#include "log_prob.hpp"
#include "model.hpp"

namespace mlb {

inline constexpr std::uint64_t kDefaultStateSpaceCap = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kDefaultFactorSizeCap = std::uint64_t{1} << 22;

// A permutation of exactly the non-evidence variables.
class EliminationOrder {
 public:
  EliminationOrder(const BeliefNetwork& bn, const Evidence& e, std::vector<int> order);
  std::span<const int> variables() const { return order_; }

 private:
  std::vector<int> order_;
};

// Greedy min-fill on the moral graph restricted to non-evidence variables,
// ties broken by lowest index.
EliminationOrder min_fill_order(const BeliefNetwork& bn, const Evidence& e);

// Enumerates every configuration of the non-evidence variables. Throws
// CapExceeded when their joint state count exceeds state_cap.
LogProb brute_force_pe(const BeliefNetwork& bn, const Evidence& e,
                       std::uint64_t state_cap = kDefaultStateSpaceCap);

// Sum-product variable elimination in log space. Throws CapExceeded when an
// intermediate factor would exceed factor_cap entries.
LogProb variable_elimination_pe(const BeliefNetwork& bn, const Evidence& e,
                                const EliminationOrder& order,
                                std::uint64_t factor_cap = kDefaultFactorSizeCap);

LogProb variable_elimination_pe(const BeliefNetwork& bn, const Evidence& e,
                                std::uint64_t factor_cap = kDefaultFactorSizeCap);

}  // namespace mlb
