#include "model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace mlb {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string_view next(const char* what) {
    skip_space();
    if (pos_ >= text_.size())
      throw ParseError(std::string("unexpected end of input, expected ") + what);
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  long long next_int(const char* what) {
    const std::string_view tok = next(what);
    long long v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size())
      throw ParseError(std::string("expected integer for ") + what + ", got '" +
                       std::string(tok) + "'");
    return v;
  }

  double next_double(const char* what) {
    const std::string tok(next(what));
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'");
    return v;
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<int> kahn_order(const std::vector<int>& cards, const std::vector<Cpt>& cpts) {
  const std::size_t n = cards.size();
  std::vector<std::vector<int>> children(n);
  std::vector<int> indegree(n, 0);
  for (const Cpt& c : cpts) {
    for (int p : c.parents) children[static_cast<std::size_t>(p)].push_back(c.child);
    indegree[static_cast<std::size_t>(c.child)] = static_cast<int>(c.parents.size());
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(static_cast<int>(v));
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  if (order.size() != n) throw InvalidArgument("parent structure contains a cycle");
  return order;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool Assignment::full() const {
  return std::none_of(values_.begin(), values_.end(), [](int v) { return v == kUnset; });
}

BeliefNetwork::BeliefNetwork(std::vector<int> cardinalities, std::vector<Cpt> cpts)
    : cards_(std::move(cardinalities)) {
  const std::size_t n = cards_.size();
  for (std::size_t v = 0; v < n; ++v)
    if (cards_[v] <= 0)
      throw InvalidArgument("variable " + std::to_string(v) + " has cardinality " +
                            std::to_string(cards_[v]));
  if (cpts.size() != n)
    throw InvalidArgument("expected " + std::to_string(n) + " CPTs, got " +
                          std::to_string(cpts.size()));

  cpts_.resize(n);
  std::vector<bool> seen(n, false);
  for (Cpt& c : cpts) {
    if (c.child < 0 || static_cast<std::size_t>(c.child) >= n)
      throw InvalidArgument("CPT child index " + std::to_string(c.child) + " out of range");
    const auto child = static_cast<std::size_t>(c.child);
    if (seen[child])
      throw InvalidArgument("variable " + std::to_string(c.child) + " has two CPTs");
    seen[child] = true;

    std::size_t rows = 1;
    std::vector<int> sorted = c.parents;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("CPT of variable " + std::to_string(c.child) +
                            " lists a parent twice");
    for (int p : c.parents) {
      if (p < 0 || static_cast<std::size_t>(p) >= n || p == c.child)
        throw InvalidArgument("CPT of variable " + std::to_string(c.child) +
                              " has invalid parent " + std::to_string(p));
      rows *= static_cast<std::size_t>(cards_[static_cast<std::size_t>(p)]);
    }
    const auto width = static_cast<std::size_t>(cards_[child]);
    if (c.table.size() != rows * width)
      throw InvalidArgument("CPT of variable " + std::to_string(c.child) + " has " +
                            std::to_string(c.table.size()) + " entries, expected " +
                            std::to_string(rows * width));
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const double p = c.table[r * width + j];
        if (!(p >= 0.0 && p <= 1.0))
          throw InvalidArgument("CPT of variable " + std::to_string(c.child) + " row " +
                                std::to_string(r) + " has entry outside [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw InvalidArgument("CPT of variable " + std::to_string(c.child) + " row " +
                              std::to_string(r) + " sums to " + format_double(sum));
    }
    cpts_[child] = std::move(c);
  }
  topo_ = kahn_order(cards_, cpts_);
}

int BeliefNetwork::max_cardinality() const {
  return cards_.empty() ? 0 : *std::max_element(cards_.begin(), cards_.end());
}

std::size_t BeliefNetwork::row_index(int var, const Assignment& x) const {
  std::size_t row = 0;
  for (int p : cpt(var).parents)
    row = row * static_cast<std::size_t>(cardinality(p)) + static_cast<std::size_t>(x[p]);
  return row;
}

double BeliefNetwork::probability(int var, const Assignment& x) const {
  return cpt(var).table[row_index(var, x) * static_cast<std::size_t>(cardinality(var)) +
                        static_cast<std::size_t>(x[var])];
}

Evidence::Evidence(const BeliefNetwork& bn, std::vector<std::pair<int, int>> pairs)
    : pairs_(std::move(pairs)) {
  for (const auto& [var, val] : pairs_) {
    if (var < 0 || static_cast<std::size_t>(var) >= bn.size())
      throw InvalidArgument("evidence variable " + std::to_string(var) + " out of range");
    if (val < 0 || val >= bn.cardinality(var))
      throw InvalidArgument("evidence value " + std::to_string(val) + " out of range for variable " +
                            std::to_string(var));
  }
  std::sort(pairs_.begin(), pairs_.end());
  for (std::size_t i = 1; i < pairs_.size(); ++i)
    if (pairs_[i].first == pairs_[i - 1].first)
      throw InvalidArgument("evidence assigns variable " + std::to_string(pairs_[i].first) +
                            " twice");
}

bool Evidence::contains(int var) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), std::pair{var, 0},
                            [](const auto& a, const auto& b) { return a.first < b.first; });
}

int Evidence::value(int var) const {
  const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{var, 0},
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it == pairs_.end() || it->first != var)
    throw InvalidArgument("variable " + std::to_string(var) + " is not observed");
  return it->second;
}

Assignment Evidence::clamp(std::size_t num_vars) const {
  Assignment x(num_vars);
  for (const auto& [var, val] : pairs_) x.set(var, val);
  return x;
}

BeliefNetwork parse_model(std::string_view text) {
  Tokenizer tok(text);
  const std::string_view header = tok.next("header");
  if (header != "BAYES")
    throw ParseError("expected header 'BAYES', got '" + std::string(header) + "'");
  const long long n = tok.next_int("variable count");
  if (n < 0) throw ParseError("negative variable count");
  std::vector<int> cards(static_cast<std::size_t>(n));
  for (auto& c : cards) {
    const long long v = tok.next_int("cardinality");
    if (v <= 0) throw ParseError("cardinality must be positive, got " + std::to_string(v));
    c = static_cast<int>(v);
  }
  const long long m = tok.next_int("function count");
  if (m != n)
    throw ParseError("function count " + std::to_string(m) + " does not match variable count " +
                     std::to_string(n));

  std::vector<Cpt> cpts(static_cast<std::size_t>(m));
  for (auto& c : cpts) {
    const long long k = tok.next_int("scope size");
    if (k < 1) throw ParseError("scope size must be at least 1");
    std::vector<int> scope(static_cast<std::size_t>(k));
    for (auto& v : scope) {
      const long long idx = tok.next_int("scope variable");
      if (idx < 0 || idx >= n) throw ParseError("scope variable " + std::to_string(idx) + " out of range");
      v = static_cast<int>(idx);
    }
    c.child = scope.back();
    scope.pop_back();
    c.parents = std::move(scope);
  }
  for (std::size_t f = 0; f < cpts.size(); ++f) {
    Cpt& c = cpts[f];
    std::size_t expected = static_cast<std::size_t>(cards[static_cast<std::size_t>(c.child)]);
    for (int p : c.parents) expected *= static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]);
    const long long count = tok.next_int("table entry count");
    if (count < 0 || static_cast<std::size_t>(count) != expected)
      throw ParseError("table " + std::to_string(f) + " has " + std::to_string(count) +
                       " entries, expected " + std::to_string(expected));
    c.table.resize(expected);
    for (double& p : c.table) p = tok.next_double("probability");
  }
  if (!tok.done()) throw ParseError("trailing tokens after last table");

  try {
    return BeliefNetwork(std::move(cards), std::move(cpts));
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
}

BeliefNetwork load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string serialize_model(const BeliefNetwork& bn) {
  std::string out = "BAYES\n" + std::to_string(bn.size()) + "\n";
  for (std::size_t v = 0; v < bn.size(); ++v) {
    if (v) out += ' ';
    out += std::to_string(bn.cardinality(static_cast<int>(v)));
  }
  out += "\n" + std::to_string(bn.size()) + "\n";
  for (const Cpt& c : bn.cpts()) {
    out += std::to_string(c.parents.size() + 1);
    for (int p : c.parents) out += ' ' + std::to_string(p);
    out += ' ' + std::to_string(c.child) + '\n';
  }
  for (const Cpt& c : bn.cpts()) {
    out += "\n" + std::to_string(c.table.size()) + "\n";
    const auto width = static_cast<std::size_t>(bn.cardinality(c.child));
    for (std::size_t i = 0; i < c.table.size(); ++i) {
      out += format_double(c.table[i]);
      out += (i + 1) % width == 0 ? '\n' : ' ';
    }
  }
  return out;
}

Evidence parse_evidence(const BeliefNetwork& bn, std::string_view text) {
  Tokenizer tok(text);
  const long long count = tok.next_int("evidence count");
  if (count < 0) throw ParseError("negative evidence count");
  std::vector<std::pair<int, int>> pairs;
  for (long long i = 0; i < count; ++i) {
    const long long var = tok.next_int("evidence variable");
    const long long val = tok.next_int("evidence value");
    if (var < 0 || var >= static_cast<long long>(bn.size()))
      throw ParseError("evidence variable " + std::to_string(var) + " out of range");
    if (val < 0 || val >= bn.cardinality(static_cast<int>(var)))
      throw ParseError("evidence value " + std::to_string(val) + " out of range for variable " +
                       std::to_string(var));
    pairs.emplace_back(static_cast<int>(var), static_cast<int>(val));
  }
  if (!tok.done()) throw ParseError("trailing tokens after evidence pairs");
  try {
    return Evidence(bn, std::move(pairs));
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
}

Evidence load_evidence(const BeliefNetwork& bn, const std::string& path) {
  return parse_evidence(bn, read_file(path));
}

std::string serialize_evidence(const Evidence& e) {
  std::string out = std::to_string(e.size());
  for (const auto& [var, val] : e.pairs()) out += ' ' + std::to_string(var) + ' ' + std::to_string(val);
  out += '\n';
  return out;
}

LogProb log_joint(const BeliefNetwork& bn, const Evidence& e, const Assignment& x) {
  if (x.size() != bn.size() || !x.full())
    throw InvalidArgument("log_joint requires a full assignment");
  for (const auto& [var, val] : e.pairs())
    if (x[var] != val) throw InvalidArgument("assignment contradicts evidence");
  double sum = 0.0;
  for (std::size_t v = 0; v < bn.size(); ++v) {
    const int var = static_cast<int>(v);
    if (x[var] >= bn.cardinality(var)) throw InvalidArgument("assignment value out of range");
    const double p = bn.probability(var, x);
    if (p == 0.0) return LogProb::zero();
    sum += std::log(p);
  }
  return LogProb::from_log(sum);
}

ReducedCpt reduce_cpt(const BeliefNetwork& bn, const Evidence& e, int var) {
  const Cpt& c = bn.cpt(var);
  ReducedCpt out;
  out.child = var;
  out.child_observed = e.contains(var);
  for (int p : c.parents)
    if (!e.contains(p)) out.context.push_back(p);

  std::size_t context_rows = 1;
  for (int p : out.context) context_rows *= static_cast<std::size_t>(bn.cardinality(p));
  const auto width = static_cast<std::size_t>(bn.cardinality(var));
  const std::size_t out_width = out.child_observed ? 1 : width;
  out.table.resize(context_rows * out_width);

  Assignment x = e.clamp(bn.size());
  for (std::size_t r = 0; r < context_rows; ++r) {
    // Decode r into the context variables (last varies fastest).
    std::size_t rem = r;
    for (std::size_t j = out.context.size(); j-- > 0;) {
      const auto card = static_cast<std::size_t>(bn.cardinality(out.context[j]));
      x.set(out.context[j], static_cast<int>(rem % card));
      rem /= card;
    }
    const std::size_t base = bn.row_index(var, x) * width;
    if (out.child_observed) {
      out.table[r] = c.table[base + static_cast<std::size_t>(e.value(var))];
    } else {
      for (std::size_t j = 0; j < width; ++j) out.table[r * width + j] = c.table[base + j];
    }
  }
  return out;
}

std::vector<int> non_evidence_variables(const BeliefNetwork& bn, const Evidence& e) {
  std::vector<int> out;
  for (int v : bn.topological_order())
    if (!e.contains(v)) out.push_back(v);
  return out;
}

}  // namespace mlb
