#include "generator.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "proposal.hpp"
#include "rng.hpp"

namespace mlb {

namespace {

// First k entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<int> choose_distinct(int n, int k, RngStream& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

Assignment forward_sample(const BeliefNetwork& bn, RngStream& rng) {
  Assignment x(bn.size());
  for (int v : bn.topological_order()) {
    const auto width = static_cast<std::size_t>(bn.cardinality(v));
    const auto row = std::span<const double>(bn.cpt(v).table).subspan(bn.row_index(v, x) * width, width);
    x.set(v, draw_from_row(row, rng.uniform()));
  }
  return x;
}

Evidence observe(const BeliefNetwork& bn, const Assignment& x, const std::vector<int>& vars) {
  std::vector<std::pair<int, int>> pairs;
  for (int v : vars) pairs.emplace_back(v, x[v]);
  return Evidence(bn, std::move(pairs));
}

}  // namespace

GeneratedInstance generate_random_network(int n, int d, double zero_fraction, int evidence_count,
                                          std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidArgument("generator needs n >= 1 and d >= 1");
  if (!(zero_fraction >= 0.0 && zero_fraction <= 0.9))
    throw InvalidArgument("zero_fraction must lie in [0, 0.9]");
  if (evidence_count < 0 || evidence_count > n)
    throw InvalidArgument("evidence_count must lie in [0, n]");

  RngStream rng = RngStream(seed).derive("random-network");
  std::uniform_int_distribution<int> card_dist(std::min(2, d), d);
  std::exponential_distribution<double> mass(1.0);

  std::vector<int> cards(static_cast<std::size_t>(n));
  for (int& c : cards) c = card_dist(rng);

  std::vector<Cpt> cpts;
  for (int v = 0; v < n; ++v) {
    Cpt c;
    c.child = v;
    std::uniform_int_distribution<int> parent_count(0, std::min(3, v));
    c.parents = choose_distinct(v, parent_count(rng), rng);
    std::sort(c.parents.begin(), c.parents.end());
    std::size_t rows = 1;
    for (int p : c.parents) rows *= static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]);
    const auto width = static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]);
    c.table.resize(rows * width);
    for (std::size_t r = 0; r < rows; ++r) {
      double* row = c.table.data() + r * width;
      double sum = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        row[j] = rng.uniform() < zero_fraction ? 0.0 : mass(rng) + 1e-3;
        sum += row[j];
      }
      if (sum == 0.0) {
        std::uniform_int_distribution<std::size_t> pick(0, width - 1);
        row[pick(rng)] = 1.0;
        sum = 1.0;
      }
      for (std::size_t j = 0; j < width; ++j) row[j] /= sum;
    }
    cpts.push_back(std::move(c));
  }
  BeliefNetwork bn(std::move(cards), std::move(cpts));
  const Assignment x = forward_sample(bn, rng);
  std::vector<int> observed = choose_distinct(n, evidence_count, rng);
  Evidence e = observe(bn, x, observed);
  return {std::move(bn), std::move(e)};
}

GeneratedInstance generate_two_layer_network(int roots, int leaves, int parents_per_leaf,
                                             std::uint64_t seed) {
  if (roots < 1 || leaves < 0 || parents_per_leaf < 1 || parents_per_leaf > roots)
    throw InvalidArgument("invalid two-layer network shape");
  RngStream rng = RngStream(seed).derive("two-layer-network");
  const int n = roots + leaves;
  std::vector<int> cards(static_cast<std::size_t>(n), 2);
  std::vector<Cpt> cpts;
  for (int v = 0; v < roots; ++v) cpts.push_back(Cpt{v, {}, {0.5, 0.5}});
  for (int l = 0; l < leaves; ++l) {
    Cpt c;
    c.child = roots + l;
    c.parents = choose_distinct(roots, parents_per_leaf, rng);
    std::sort(c.parents.begin(), c.parents.end());
    const std::size_t rows = std::size_t{1} << parents_per_leaf;
    c.table.resize(rows * 2);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t out = rng() & 1U;
      c.table[r * 2 + out] = 1.0;
    }
    cpts.push_back(std::move(c));
  }
  BeliefNetwork bn(std::move(cards), std::move(cpts));
  const Assignment x = forward_sample(bn, rng);
  std::vector<int> observed(static_cast<std::size_t>(leaves));
  std::iota(observed.begin(), observed.end(), roots);
  Evidence e = observe(bn, x, observed);
  return {std::move(bn), std::move(e)};
}

}  // namespace mlb
