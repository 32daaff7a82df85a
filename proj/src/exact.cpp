#include "exact.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace mlb {

namespace {

// Log-space table factor. Variables ascending, last variable fastest.
struct Factor {
  std::vector<int> vars;
  std::vector<int> cards;
  std::vector<double> logs;
};

std::uint64_t offsets_product(const std::vector<int>& cards, std::uint64_t cap, const char* what) {
  std::uint64_t size = 1;
  for (int c : cards) {
    size *= static_cast<std::uint64_t>(c);
    if (size > cap)
      throw CapExceeded(std::string(what) + " exceeds cap of " + std::to_string(cap));
  }
  return size;
}

Factor from_reduced(const BeliefNetwork& bn, const ReducedCpt& r) {
  std::vector<int> scope = r.context;
  if (!r.child_observed) scope.push_back(r.child);

  Factor f;
  f.vars = scope;
  std::sort(f.vars.begin(), f.vars.end());
  for (int v : f.vars) f.cards.push_back(bn.cardinality(v));
  std::size_t size = 1;
  for (int c : f.cards) size *= static_cast<std::size_t>(c);
  f.logs.assign(size, 0.0);

  // Strides of the reduced table's (CPT-ordered) layout.
  std::vector<std::size_t> src_stride(scope.size());
  std::size_t s = 1;
  for (std::size_t j = scope.size(); j-- > 0;) {
    src_stride[j] = s;
    s *= static_cast<std::size_t>(bn.cardinality(scope[j]));
  }
  std::vector<int> cfg(f.vars.size(), 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t src = 0;
    for (std::size_t j = 0; j < scope.size(); ++j) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(f.vars.begin(), f.vars.end(), scope[j]) - f.vars.begin());
      src += src_stride[j] * static_cast<std::size_t>(cfg[pos]);
    }
    const double p = r.table[src];
    f.logs[idx] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    for (std::size_t j = cfg.size(); j-- > 0;) {
      if (++cfg[j] < f.cards[j]) break;
      cfg[j] = 0;
    }
  }
  return f;
}

// Multiplies the factors and sums out `var`, all in log space.
Factor multiply_and_eliminate(const std::vector<const Factor*>& factors, int var,
                              std::uint64_t cap) {
  std::vector<int> scope;
  for (const Factor* f : factors) scope.insert(scope.end(), f->vars.begin(), f->vars.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());

  std::vector<int> cards;
  std::size_t var_pos = scope.size();
  for (std::size_t j = 0; j < scope.size(); ++j) {
    if (scope[j] == var) var_pos = j;
    for (const Factor* f : factors) {
      const auto it = std::lower_bound(f->vars.begin(), f->vars.end(), scope[j]);
      if (it != f->vars.end() && *it == scope[j]) {
        cards.push_back(f->cards[static_cast<std::size_t>(it - f->vars.begin())]);
        break;
      }
    }
  }
  const std::uint64_t total = offsets_product(cards, cap, "intermediate factor");

  // strides[f][j]: stride of scope[j] inside factor f (0 when absent).
  std::vector<std::vector<std::size_t>> strides(factors.size(), std::vector<std::size_t>(scope.size(), 0));
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    const Factor& f = *factors[fi];
    std::size_t s = 1;
    for (std::size_t k = f.vars.size(); k-- > 0;) {
      const auto j = static_cast<std::size_t>(
          std::lower_bound(scope.begin(), scope.end(), f.vars[k]) - scope.begin());
      strides[fi][j] = s;
      s *= static_cast<std::size_t>(f.cards[k]);
    }
  }

  Factor out;
  for (std::size_t j = 0; j < scope.size(); ++j) {
    if (j == var_pos) continue;
    out.vars.push_back(scope[j]);
    out.cards.push_back(cards[j]);
  }
  std::size_t out_size = 1;
  for (int c : out.cards) out_size *= static_cast<std::size_t>(c);
  std::vector<LogSumAccumulator> acc(out_size);

  std::vector<int> cfg(scope.size(), 0);
  std::vector<std::size_t> index(factors.size(), 0);
  for (std::uint64_t n = 0; n < total; ++n) {
    double sum = 0.0;
    for (std::size_t fi = 0; fi < factors.size(); ++fi) sum += factors[fi]->logs[index[fi]];
    std::size_t out_idx = 0;
    for (std::size_t j = 0; j < scope.size(); ++j) {
      if (j == var_pos) continue;
      out_idx = out_idx * static_cast<std::size_t>(cards[j]) + static_cast<std::size_t>(cfg[j]);
    }
    acc[out_idx].add(sum);
    for (std::size_t j = cfg.size(); j-- > 0;) {
      if (++cfg[j] < cards[j]) {
        for (std::size_t fi = 0; fi < factors.size(); ++fi) index[fi] += strides[fi][j];
        break;
      }
      for (std::size_t fi = 0; fi < factors.size(); ++fi)
        index[fi] -= strides[fi][j] * static_cast<std::size_t>(cards[j] - 1);
      cfg[j] = 0;
    }
  }
  out.logs.resize(out_size);
  for (std::size_t i = 0; i < out_size; ++i) out.logs[i] = acc[i].result().log();
  return out;
}

std::vector<std::set<int>> interaction_graph(const BeliefNetwork& bn, const Evidence& e) {
  std::vector<std::set<int>> adj(bn.size());
  for (std::size_t v = 0; v < bn.size(); ++v) {
    const ReducedCpt r = reduce_cpt(bn, e, static_cast<int>(v));
    std::vector<int> scope = r.context;
    if (!r.child_observed) scope.push_back(r.child);
    for (int a : scope)
      for (int b : scope)
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
  }
  return adj;
}

}  // namespace

EliminationOrder::EliminationOrder(const BeliefNetwork& bn, const Evidence& e,
                                   std::vector<int> order)
    : order_(std::move(order)) {
  std::vector<int> expected = non_evidence_variables(bn, e);
  std::vector<int> got = order_;
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  if (expected != got)
    throw InvalidArgument("elimination order must be a permutation of the non-evidence variables");
}

EliminationOrder min_fill_order(const BeliefNetwork& bn, const Evidence& e) {
  auto adj = interaction_graph(bn, e);
  std::vector<bool> done(bn.size(), false);
  for (const auto& [var, val] : e.pairs()) done[static_cast<std::size_t>(var)] = true;
  const std::size_t remaining_count = bn.size() - e.size();

  std::vector<int> order;
  order.reserve(remaining_count);
  for (std::size_t step = 0; step < remaining_count; ++step) {
    int best = -1;
    std::size_t best_fill = std::numeric_limits<std::size_t>::max();
    for (std::size_t v = 0; v < bn.size(); ++v) {
      if (done[v]) continue;
      std::size_t fill = 0;
      const std::vector<int> nb(adj[v].begin(), adj[v].end());
      for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b)
          if (!adj[static_cast<std::size_t>(nb[a])].count(nb[b])) ++fill;
      if (fill < best_fill) {
        best_fill = fill;
        best = static_cast<int>(v);
      }
    }
    const auto bv = static_cast<std::size_t>(best);
    const std::vector<int> nb(adj[bv].begin(), adj[bv].end());
    for (int a : nb) {
      for (int b : nb)
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
      adj[static_cast<std::size_t>(a)].erase(best);
    }
    adj[bv].clear();
    done[bv] = true;
    order.push_back(best);
  }
  return EliminationOrder(bn, e, std::move(order));
}

LogProb brute_force_pe(const BeliefNetwork& bn, const Evidence& e, std::uint64_t state_cap) {
  const std::vector<int> free = non_evidence_variables(bn, e);
  std::vector<int> cards;
  for (int v : free) cards.push_back(bn.cardinality(v));
  const std::uint64_t total = offsets_product(cards, state_cap, "state space");

  Assignment x = e.clamp(bn.size());
  for (int v : free) x.set(v, 0);
  LogSumAccumulator acc;
  for (std::uint64_t n = 0; n < total; ++n) {
    acc.add(log_joint(bn, e, x));
    for (std::size_t j = free.size(); j-- > 0;) {
      const int v = free[j];
      if (x[v] + 1 < bn.cardinality(v)) {
        x.set(v, x[v] + 1);
        break;
      }
      x.set(v, 0);
    }
  }
  return acc.result();
}

LogProb variable_elimination_pe(const BeliefNetwork& bn, const Evidence& e,
                                const EliminationOrder& order, std::uint64_t factor_cap) {
  std::vector<Factor> pool;
  pool.reserve(bn.size() * 2);
  for (std::size_t v = 0; v < bn.size(); ++v)
    pool.push_back(from_reduced(bn, reduce_cpt(bn, e, static_cast<int>(v))));
  std::vector<bool> alive(pool.size(), true);

  for (int var : order.variables()) {
    std::vector<const Factor*> bucket;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!alive[i]) continue;
      if (std::binary_search(pool[i].vars.begin(), pool[i].vars.end(), var)) {
        bucket.push_back(&pool[i]);
        used.push_back(i);
      }
    }
    if (bucket.empty()) continue;
    Factor result = multiply_and_eliminate(bucket, var, factor_cap);
    for (std::size_t i : used) alive[i] = false;
    pool.push_back(std::move(result));
    alive.push_back(true);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!alive[i]) continue;
    // Every remaining factor is a scalar once all free variables are summed out.
    if (pool[i].logs[0] == -std::numeric_limits<double>::infinity()) return LogProb::zero();
    total += pool[i].logs[0];
  }
  return LogProb::from_log(total);
}

LogProb variable_elimination_pe(const BeliefNetwork& bn, const Evidence& e,
                                std::uint64_t factor_cap) {
  return variable_elimination_pe(bn, e, min_fill_order(bn, e), factor_cap);
}

}  // namespace mlb
