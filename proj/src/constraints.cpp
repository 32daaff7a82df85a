#include "constraints.hpp"

#include <algorithm>

namespace mlb {

Relation::Relation(std::vector<int> scope, std::vector<int> scope_cards,
                   std::unordered_set<std::uint64_t> allowed_codes)
    : scope_(std::move(scope)), cards_(std::move(scope_cards)), allowed_(std::move(allowed_codes)) {
  if (scope_.size() != cards_.size()) throw InvalidArgument("relation scope/cardinality mismatch");
  std::uint64_t size = 1;
  for (int c : cards_) {
    if (c <= 0) throw InvalidArgument("relation cardinality must be positive");
    size *= static_cast<std::uint64_t>(c);
  }
  for (std::uint64_t code : allowed_)
    if (code >= size) throw InvalidArgument("relation tuple out of range");
}

Relation::Relation(std::vector<int> scope, std::vector<int> scope_cards,
                   const std::vector<std::vector<int>>& allowed)
    : Relation(std::move(scope), std::move(scope_cards), std::unordered_set<std::uint64_t>{}) {
  for (const auto& t : allowed) {
    if (t.size() != scope_.size()) throw InvalidArgument("relation tuple has wrong length");
    for (std::size_t j = 0; j < t.size(); ++j)
      if (t[j] < 0 || t[j] >= cards_[j]) throw InvalidArgument("relation tuple value out of range");
    allowed_.insert(encode(t));
  }
}

std::uint64_t Relation::encode(std::span<const int> tuple) const {
  std::uint64_t code = 0;
  for (std::size_t j = 0; j < tuple.size(); ++j)
    code = code * static_cast<std::uint64_t>(cards_[j]) + static_cast<std::uint64_t>(tuple[j]);
  return code;
}

bool Relation::allows(const Assignment& x) const {
  std::uint64_t code = 0;
  for (std::size_t j = 0; j < scope_.size(); ++j)
    code = code * static_cast<std::uint64_t>(cards_[j]) + static_cast<std::uint64_t>(x[scope_[j]]);
  return allowed_.count(code) > 0;
}

std::vector<std::vector<int>> Relation::tuples() const {
  std::vector<std::uint64_t> codes(allowed_.begin(), allowed_.end());
  std::sort(codes.begin(), codes.end());
  std::vector<std::vector<int>> out;
  for (std::uint64_t code : codes) {
    std::vector<int> t(scope_.size());
    for (std::size_t j = scope_.size(); j-- > 0;) {
      t[j] = static_cast<int>(code % static_cast<std::uint64_t>(cards_[j]));
      code /= static_cast<std::uint64_t>(cards_[j]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

ConstraintNetwork::ConstraintNetwork(std::vector<int> cardinalities, std::vector<Relation> relations)
    : cards_(std::move(cardinalities)), relations_(std::move(relations)), watch_(cards_.size()) {
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    const Relation& rel = relations_[r];
    for (std::size_t j = 0; j < rel.scope().size(); ++j) {
      const int v = rel.scope()[j];
      if (v < 0 || static_cast<std::size_t>(v) >= cards_.size())
        throw InvalidArgument("relation scope references unknown variable " + std::to_string(v));
      if (rel.scope_cards()[j] != cards_[static_cast<std::size_t>(v)])
        throw InvalidArgument("relation cardinality disagrees with variable " + std::to_string(v));
      watch_[static_cast<std::size_t>(v)].push_back(static_cast<int>(r));
    }
  }
}

bool ConstraintNetwork::has_empty_relation() const {
  return std::any_of(relations_.begin(), relations_.end(), [](const Relation& r) { return r.empty(); });
}

bool ConstraintNetwork::consistent_after(const Assignment& x, int var) const {
  for (int r : relations_of(var)) {
    const Relation& rel = relations_[static_cast<std::size_t>(r)];
    const auto scope = rel.scope();
    if (std::all_of(scope.begin(), scope.end(), [&](int v) { return x.is_set(v); }) &&
        !rel.allows(x))
      return false;
  }
  return true;
}

ConstraintNetwork extract_constraints(const BeliefNetwork& bn, const Evidence& e) {
  std::vector<int> cards(bn.cardinalities().begin(), bn.cardinalities().end());
  std::vector<Relation> relations;
  for (const Cpt& c : bn.cpts()) {
    if (std::none_of(c.table.begin(), c.table.end(), [](double p) { return p == 0.0; })) continue;
    std::vector<int> scope = c.parents;
    scope.push_back(c.child);
    std::vector<int> scope_cards;
    for (int v : scope) scope_cards.push_back(bn.cardinality(v));
    // CPT entry indices coincide with tuple codes over (parents..., child).
    std::unordered_set<std::uint64_t> allowed;
    for (std::size_t i = 0; i < c.table.size(); ++i)
      if (c.table[i] > 0.0) allowed.insert(i);
    relations.emplace_back(std::move(scope), std::move(scope_cards), std::move(allowed));
  }
  for (const auto& [var, val] : e.pairs())
    relations.emplace_back(std::vector<int>{var}, std::vector<int>{bn.cardinality(var)},
                           std::unordered_set<std::uint64_t>{static_cast<std::uint64_t>(val)});
  return ConstraintNetwork(std::move(cards), std::move(relations));
}

bool consistent_partial(const ConstraintNetwork& cn, const Assignment& x) {
  for (const Relation& rel : cn.relations()) {
    const auto scope = rel.scope();
    if (std::all_of(scope.begin(), scope.end(), [&](int v) { return x.is_set(v); }) &&
        !rel.allows(x))
      return false;
  }
  return true;
}

ExtendabilityOracle::ExtendabilityOracle(const ConstraintNetwork& cn, std::vector<int> order)
    : cn_(&cn), order_(std::move(order)) {
  std::vector<bool> listed(cn.num_vars(), false);
  for (int v : order_) {
    if (v < 0 || static_cast<std::size_t>(v) >= cn.num_vars() || listed[static_cast<std::size_t>(v)])
      throw InvalidArgument("oracle order must list distinct valid variables");
    listed[static_cast<std::size_t>(v)] = true;
  }
  for (std::size_t v = 0; v < cn.num_vars(); ++v)
    if (!listed[v]) order_.push_back(static_cast<int>(v));
  offset_.resize(cn.num_vars() + 1, 0);
  for (std::size_t v = 0; v < cn.num_vars(); ++v)
    offset_[v + 1] = offset_[v] + static_cast<std::size_t>(cn.cardinalities()[v]);
}

ExtendabilityOracle::ExtendabilityOracle(const ConstraintNetwork& cn)
    : ExtendabilityOracle(cn, std::vector<int>{}) {}

bool ExtendabilityOracle::prune_single_unassigned(const Assignment& x,
                                                  std::vector<std::uint8_t>& live,
                                                  const Relation& rel) const {
  const auto scope = rel.scope();
  std::vector<int> tuple(scope.size());
  std::size_t free_slot = 0;
  for (std::size_t j = 0; j < scope.size(); ++j) {
    tuple[j] = x[scope[j]];
    if (tuple[j] == Assignment::kUnset) free_slot = j;
  }
  const auto u = static_cast<std::size_t>(scope[free_slot]);
  bool any = false;
  for (std::size_t b = 0; b < offset_[u + 1] - offset_[u]; ++b) {
    if (!live[offset_[u] + b]) continue;
    tuple[free_slot] = static_cast<int>(b);
    if (rel.allows(tuple)) {
      any = true;
    } else {
      live[offset_[u] + b] = 0;
    }
  }
  return any;
}

bool ExtendabilityOracle::prune_after_assign(const Assignment& x, std::vector<std::uint8_t>& live,
                                             int var) const {
  for (int r : cn_->relations_of(var)) {
    const Relation& rel = cn_->relations()[static_cast<std::size_t>(r)];
    const auto scope = rel.scope();
    const auto unassigned = std::count_if(scope.begin(), scope.end(), [&](int v) { return !x.is_set(v); });
    if (unassigned == 0) {
      if (!rel.allows(x)) return false;
    } else if (unassigned == 1) {
      if (!prune_single_unassigned(x, live, rel)) return false;
    }
  }
  return true;
}

bool ExtendabilityOracle::search(Assignment& x, std::vector<std::uint8_t>& live, std::size_t pos) {
  while (pos < order_.size() && x.is_set(order_[pos])) ++pos;
  if (pos == order_.size()) return true;
  const int v = order_[pos];
  const auto base = offset_[static_cast<std::size_t>(v)];
  const auto card = offset_[static_cast<std::size_t>(v) + 1] - base;
  for (std::size_t a = 0; a < card; ++a) {
    if (!live[base + a]) continue;
    std::vector<std::uint8_t> next = live;
    std::fill(next.begin() + static_cast<std::ptrdiff_t>(base),
              next.begin() + static_cast<std::ptrdiff_t>(base + card), 0);
    next[base + a] = 1;
    x.set(v, static_cast<int>(a));
    const bool ok = prune_after_assign(x, next, v) && search(x, next, pos + 1);
    x.unset(v);
    if (ok) return true;
  }
  return false;
}

bool ExtendabilityOracle::is_extendable(const Assignment& x) {
  ++probes_;
  if (x.size() != cn_->num_vars()) throw InvalidArgument("assignment size mismatch");
  const auto values = x.values();
  std::string key(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(int));
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;

  Assignment work = x;
  std::vector<std::uint8_t> live(offset_.back(), 1);
  for (std::size_t v = 0; v < cn_->num_vars(); ++v) {
    if (!work.is_set(static_cast<int>(v))) continue;
    std::fill(live.begin() + static_cast<std::ptrdiff_t>(offset_[v]),
              live.begin() + static_cast<std::ptrdiff_t>(offset_[v + 1]), 0);
    live[offset_[v] + static_cast<std::size_t>(work[static_cast<int>(v)])] = 1;
  }
  bool result = true;
  for (const Relation& rel : cn_->relations()) {
    const auto scope = rel.scope();
    const auto unassigned =
        std::count_if(scope.begin(), scope.end(), [&](int v) { return !work.is_set(v); });
    if ((unassigned == 0 && !rel.allows(work)) ||
        (unassigned == 1 && !prune_single_unassigned(work, live, rel))) {
      result = false;
      break;
    }
  }
  if (result) result = search(work, live, 0);
  cache_.emplace(std::move(key), result);
  return result;
}

bool is_extendable(const ConstraintNetwork& cn, const Assignment& x) {
  ExtendabilityOracle oracle(cn);
  return oracle.is_extendable(x);
}

std::string export_dimacs(const ConstraintNetwork& cn) {
  std::vector<std::size_t> offset(cn.num_vars() + 1, 0);
  for (std::size_t v = 0; v < cn.num_vars(); ++v)
    offset[v + 1] = offset[v] + static_cast<std::size_t>(cn.cardinalities()[v]);
  auto lit = [&](int v, int a) { return std::to_string(offset[static_cast<std::size_t>(v)] + static_cast<std::size_t>(a) + 1); };

  std::vector<std::string> clauses;
  for (std::size_t v = 0; v < cn.num_vars(); ++v) {
    const int var = static_cast<int>(v);
    const int card = cn.cardinalities()[v];
    std::string alo;
    for (int a = 0; a < card; ++a) alo += lit(var, a) + ' ';
    clauses.push_back(alo + '0');
    for (int a = 0; a < card; ++a)
      for (int b = a + 1; b < card; ++b) clauses.push_back('-' + lit(var, a) + " -" + lit(var, b) + " 0");
  }
  for (const Relation& rel : cn.relations()) {
    const auto scope = rel.scope();
    std::vector<int> tuple(scope.size(), 0);
    bool more = true;
    while (more) {
      if (!rel.allows(tuple)) {
        std::string c;
        for (std::size_t j = 0; j < scope.size(); ++j) c += '-' + lit(scope[j], tuple[j]) + ' ';
        clauses.push_back(c + '0');
      }
      more = false;
      for (std::size_t j = scope.size(); j-- > 0;) {
        if (++tuple[j] < rel.scope_cards()[j]) {
          more = true;
          break;
        }
        tuple[j] = 0;
      }
    }
  }
  std::string out = "c one-hot encoding: literal offset(v) + a + 1 is (v = a)\n";
  out += "p cnf " + std::to_string(offset.back()) + ' ' + std::to_string(clauses.size()) + '\n';
  for (const auto& c : clauses) out += c + '\n';
  return out;
}

}  // namespace mlb
