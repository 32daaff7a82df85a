#include <algorithm>
#include <numeric>

#include "proposal.hpp"

namespace mlb {

namespace {

// Evidence-reduced CPT as a factor over (context..., child).
struct BpFactor {
  std::vector<int> scope;
  std::vector<int> cards;
  std::vector<double> table;
  std::vector<std::vector<double>> to_var;    // factor -> variable, per scope slot
  std::vector<std::vector<double>> from_var;  // variable -> factor, per scope slot
};

void normalize_or_uniform(std::vector<double>& m) {
  const double sum = std::accumulate(m.begin(), m.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : m) v /= sum;
  } else {
    std::fill(m.begin(), m.end(), 1.0 / static_cast<double>(m.size()));
  }
}

// Odometer over the factor's scope with the last slot fastest.
template <typename Fn>
void for_each_entry(const BpFactor& f, Fn&& fn) {
  std::vector<int> cfg(f.scope.size(), 0);
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    fn(idx, cfg);
    for (std::size_t j = cfg.size(); j-- > 0;) {
      if (++cfg[j] < f.cards[j]) break;
      cfg[j] = 0;
    }
  }
}

}  // namespace

FactoredProposal build_bp_proposal(const BeliefNetwork& bn, const Evidence& e,
                                   const BpOptions& options) {
  if (options.iterations < 1) throw InvalidArgument("BP iterations must be at least 1");
  if (!(options.damping >= 0.0 && options.damping < 1.0))
    throw InvalidArgument("BP damping must lie in [0, 1)");
  if (!(options.floor > 0.0)) throw InvalidArgument("BP floor must be positive");

  const std::vector<int> order = non_evidence_variables(bn, e);
  std::vector<BpFactor> factors;
  std::vector<int> family(bn.size(), -1);  // factor index of each unobserved CPT
  std::vector<std::vector<std::pair<int, int>>> attached(bn.size());  // (factor, slot)

  for (std::size_t v = 0; v < bn.size(); ++v) {
    ReducedCpt r = reduce_cpt(bn, e, static_cast<int>(v));
    BpFactor f;
    f.scope = r.context;
    if (!r.child_observed) f.scope.push_back(r.child);
    if (f.scope.empty()) continue;  // constant
    for (int s : f.scope) f.cards.push_back(bn.cardinality(s));
    f.table = std::move(r.table);
    for (int c : f.cards) {
      f.to_var.emplace_back(static_cast<std::size_t>(c), 1.0 / c);
      f.from_var.emplace_back(static_cast<std::size_t>(c), 1.0 / c);
    }
    const int fi = static_cast<int>(factors.size());
    if (!r.child_observed) family[v] = fi;
    for (std::size_t j = 0; j < f.scope.size(); ++j)
      attached[static_cast<std::size_t>(f.scope[j])].emplace_back(fi, static_cast<int>(j));
    factors.push_back(std::move(f));
  }

  auto update_var_to_factor = [&]() {
    for (std::size_t v = 0; v < bn.size(); ++v) {
      for (const auto& [fi, slot] : attached[v]) {
        std::vector<double> m(static_cast<std::size_t>(bn.cardinality(static_cast<int>(v))), 1.0);
        for (const auto& [gi, gslot] : attached[v]) {
          if (gi == fi && gslot == slot) continue;
          const auto& in = factors[static_cast<std::size_t>(gi)].to_var[static_cast<std::size_t>(gslot)];
          for (std::size_t a = 0; a < m.size(); ++a) m[a] *= in[a];
        }
        normalize_or_uniform(m);
        factors[static_cast<std::size_t>(fi)].from_var[static_cast<std::size_t>(slot)] = std::move(m);
      }
    }
  };

  for (int it = 0; it < options.iterations; ++it) {
    update_var_to_factor();
    for (BpFactor& f : factors) {
      std::vector<std::vector<double>> fresh;
      for (int c : f.cards) fresh.emplace_back(static_cast<std::size_t>(c), 0.0);
      for_each_entry(f, [&](std::size_t idx, const std::vector<int>& cfg) {
        const double p = f.table[idx];
        if (p == 0.0) return;
        for (std::size_t j = 0; j < f.scope.size(); ++j) {
          double prod = p;
          for (std::size_t k = 0; k < f.scope.size(); ++k)
            if (k != j) prod *= f.from_var[k][static_cast<std::size_t>(cfg[k])];
          fresh[j][static_cast<std::size_t>(cfg[j])] += prod;
        }
      });
      for (std::size_t j = 0; j < f.scope.size(); ++j) {
        normalize_or_uniform(fresh[j]);
        for (std::size_t a = 0; a < fresh[j].size(); ++a)
          f.to_var[j][a] = (1.0 - options.damping) * fresh[j][a] + options.damping * f.to_var[j][a];
      }
    }
  }
  update_var_to_factor();

  std::vector<ConditionalTable> tables;
  for (int v : order) {
    const BpFactor& f = factors[static_cast<std::size_t>(family[static_cast<std::size_t>(v)])];
    ConditionalTable t;
    t.variable = v;
    t.cardinality = bn.cardinality(v);
    t.context.assign(f.scope.begin(), f.scope.end() - 1);
    t.context_cards.assign(f.cards.begin(), f.cards.end() - 1);
    t.probs.assign(f.table.size(), 0.0);
    // Family belief b(y, x) = f(y, x) * prod of incoming variable messages.
    for_each_entry(f, [&](std::size_t idx, const std::vector<int>& cfg) {
      double b = f.table[idx];
      for (std::size_t k = 0; k < f.scope.size(); ++k) b *= f.from_var[k][static_cast<std::size_t>(cfg[k])];
      t.probs[idx] = b;
    });
    const auto width = static_cast<std::size_t>(t.cardinality);
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      std::vector<double> row(t.probs.begin() + static_cast<std::ptrdiff_t>(r * width),
                              t.probs.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
      normalize_or_uniform(row);
      for (double& p : row) p = std::max(p, options.floor);
      normalize_or_uniform(row);
      std::copy(row.begin(), row.end(), t.probs.begin() + static_cast<std::ptrdiff_t>(r * width));
    }
    tables.push_back(std::move(t));
  }
  return FactoredProposal(e.clamp(bn.size()), std::move(tables), true);
}

}  // namespace mlb
