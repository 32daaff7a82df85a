#include "harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "constraints.hpp"
#include "json.hpp"
#include "samplesearch.hpp"

namespace mlb {

using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json log_to_json(LogProb p) { return p.is_zero() ? json(nullptr) : json(p.log()); }
LogProb log_from_json(const json& j) { return j.is_null() ? LogProb::zero() : LogProb::from_log(j.get<double>()); }

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const char* order_form_tag(OrderStatForm f) {
  return f == OrderStatForm::per_term ? "per_term" : "single_division";
}

OrderStatForm parse_order_form(std::string_view s) {
  if (s == "per_term") return OrderStatForm::per_term;
  if (s == "single_division") return OrderStatForm::single_division;
  throw InvalidArgument("unknown order-statistics form '" + std::string(s) + "'");
}

RunStatus parse_status(std::string_view s) {
  for (RunStatus r : {RunStatus::ok, RunStatus::cap_exceeded, RunStatus::time_limit, RunStatus::unsatisfiable})
    if (status_tag(r) == s) return r;
  throw InvalidArgument("unknown status '" + std::string(s) + "'");
}

json spec_to_json(const ExperimentSpec& s) {
  json h = json::array();
  for (Heuristic x : s.heuristics) h.push_back(heuristic_tag(x));
  return {
      {"model", s.model_path},
      {"evidence", s.evidence_path},
      {"engine", engine_tag(s.engine)},
      {"proposal", proposal_tag(s.proposal)},
      {"heuristics", h},
      {"alpha", s.alpha},
      {"k", s.k},
      {"samples", s.samples},
      {"order_form", order_form_tag(s.order_form)},
      {"seed", s.seed},
      {"exact", exact_tag(s.exact)},
      {"time_limit", optional_to_json(s.time_limit_seconds)},
      {"state_cap", s.state_cap},
      {"factor_cap", s.factor_cap},
      {"bp", {{"iterations", s.bp.iterations}, {"damping", s.bp.damping}, {"floor", s.bp.floor}}},
      {"workers", s.workers},
      {"record_timing", s.record_timing},
      {"self_check", s.self_check},
  };
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  s.model_path = j.at("model").get<std::string>();
  s.evidence_path = j.at("evidence").get<std::string>();
  s.engine = parse_engine(j.at("engine").get<std::string>());
  s.proposal = parse_proposal(j.at("proposal").get<std::string>());
  s.heuristics.clear();
  for (const auto& h : j.at("heuristics")) s.heuristics.push_back(parse_heuristic(h.get<std::string>()));
  s.alpha = j.at("alpha").get<double>();
  s.k = j.at("k").get<int>();
  s.samples = j.at("samples").get<int>();
  s.order_form = parse_order_form(j.at("order_form").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.exact = parse_exact(j.at("exact").get<std::string>());
  if (!j.at("time_limit").is_null()) s.time_limit_seconds = j.at("time_limit").get<double>();
  s.state_cap = j.at("state_cap").get<std::uint64_t>();
  s.factor_cap = j.at("factor_cap").get<std::uint64_t>();
  s.bp.iterations = j.at("bp").at("iterations").get<int>();
  s.bp.damping = j.at("bp").at("damping").get<double>();
  s.bp.floor = j.at("bp").at("floor").get<double>();
  s.workers = j.at("workers").get<int>();
  s.record_timing = j.at("record_timing").get<bool>();
  s.self_check = j.at("self_check").get<bool>();
  return s;
}

json report_to_json(const Report& r) {
  const bool timing = r.spec.record_timing;
  json out;
  out["status"] = status_tag(r.status);
  out["message"] = r.message;
  out["exit_code"] = r.exit_code();
  out["params"] = spec_to_json(r.spec);
  out["instance"] = {
      {"variables", r.instance.variables},
      {"max_domain", r.instance.max_domain},
      {"evidence", r.instance.evidence},
      {"relations", optional_to_json(r.instance.relations)},
      {"context_bound", r.instance.context_bound},
  };
  if (r.exact) {
    json ex = {
        {"method", exact_tag(r.exact->method)},
        {"log_pe", r.exact->log_pe ? log_to_json(*r.exact->log_pe) : json(nullptr)},
        {"pe", r.exact->log_pe ? json(r.exact->log_pe->linear()) : json(nullptr)},
        {"error", r.exact->error.empty() ? json(nullptr) : json(r.exact->error)},
    };
    if (timing) ex["time_seconds"] = r.exact->time_seconds;
    out["exact"] = ex;
  } else {
    out["exact"] = nullptr;
  }
  out["proven_zero"] = r.proven_zero;
  json bounds = json::object();
  for (const HeuristicReport& h : r.bounds) {
    const LowerBoundResult& res = h.result;
    json per = json::array();
    for (LogProb p : res.per_iteration) per.push_back(log_to_json(p));
    json b = {
        {"log_bound", log_to_json(res.log_bound)},
        {"bound", res.log_bound.linear()},
        {"confidence", res.confidence},
        {"beta", optional_to_json(res.beta)},
        {"per_iteration", per},
        {"samples_used", res.samples_used},
        {"seed", res.seed},
        {"repetitions_completed", res.repetitions_completed},
        {"timed_out", res.timed_out},
        {"trivial", res.trivial()},
        {"delta", optional_to_json(h.delta)},
    };
    if (timing) b["time_seconds"] = h.time_seconds;
    bounds[std::string(heuristic_tag(h.heuristic))] = b;
  }
  out["bounds"] = bounds;
  out["self_check_delta"] = optional_to_json(r.self_check_delta);
  if (timing) out["total_time_seconds"] = r.total_time_seconds;
  return out;
}

Report report_from_json(const json& j) {
  Report r;
  r.spec = spec_from_json(j.at("params"));
  r.status = parse_status(j.at("status").get<std::string>());
  r.message = j.at("message").get<std::string>();
  const json& inst = j.at("instance");
  r.instance.variables = inst.at("variables").get<std::size_t>();
  r.instance.max_domain = inst.at("max_domain").get<int>();
  r.instance.evidence = inst.at("evidence").get<std::size_t>();
  if (!inst.at("relations").is_null()) r.instance.relations = inst.at("relations").get<std::size_t>();
  r.instance.context_bound = inst.at("context_bound").get<std::size_t>();
  if (!j.at("exact").is_null()) {
    const json& ex = j.at("exact");
    ExactReport e;
    e.method = parse_exact(ex.at("method").get<std::string>());
    if (!ex.at("pe").is_null()) e.log_pe = log_from_json(ex.at("log_pe"));
    if (!ex.at("error").is_null()) e.error = ex.at("error").get<std::string>();
    if (ex.contains("time_seconds")) e.time_seconds = ex.at("time_seconds").get<double>();
    r.exact = e;
  }
  r.proven_zero = j.at("proven_zero").get<bool>();
  // Bounds are emitted keyed by tag; restore the spec's heuristic order.
  const json& bounds = j.at("bounds");
  for (Heuristic h : r.spec.heuristics) {
    const std::string tag(heuristic_tag(h));
    if (!bounds.contains(tag)) continue;
    const json& b = bounds.at(tag);
    HeuristicReport hr;
    hr.heuristic = h;
    LowerBoundResult& res = hr.result;
    res.log_bound = log_from_json(b.at("log_bound"));
    res.confidence = b.at("confidence").get<double>();
    res.params = BoundParams{r.spec.alpha, r.spec.k, r.spec.samples, h, r.spec.order_form};
    if (!b.at("beta").is_null()) res.beta = b.at("beta").get<double>();
    for (const auto& p : b.at("per_iteration")) res.per_iteration.push_back(log_from_json(p));
    res.samples_used = b.at("samples_used").get<std::uint64_t>();
    res.seed = b.at("seed").get<std::uint64_t>();
    res.repetitions_completed = b.at("repetitions_completed").get<int>();
    res.timed_out = b.at("timed_out").get<bool>();
    if (!b.at("delta").is_null()) hr.delta = b.at("delta").get<double>();
    if (b.contains("time_seconds")) hr.time_seconds = b.at("time_seconds").get<double>();
    r.bounds.push_back(std::move(hr));
  }
  if (!j.at("self_check_delta").is_null()) r.self_check_delta = j.at("self_check_delta").get<double>();
  if (j.contains("total_time_seconds")) r.total_time_seconds = j.at("total_time_seconds").get<double>();
  return r;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  // Width counts code points so the Δ headers line up.
  std::size_t shown = 0;
  for (unsigned char c : s) shown += (c & 0xC0) != 0x80;
  if (shown < width) s.append(width - shown, ' ');
  return s;
}

std::string emit_table(const Report& r) {
  const std::vector<std::pair<Heuristic, const char*>> columns = {
      {Heuristic::min, "Min Δ"}, {Heuristic::average, "Avg Δ"}, {Heuristic::max, "Max Δ"},
      {Heuristic::martingale_permutation, "Per Δ"}, {Heuristic::martingale_order, "Ord Δ"}};
  auto find = [&](Heuristic h) -> const HeuristicReport* {
    for (const auto& b : r.bounds)
      if (b.heuristic == h) return &b;
    return nullptr;
  };

  std::string out;
  out += pad("(N, D, E)", 16) + pad("Exact P(e)", 12);
  for (const auto& [h, name] : columns) out += pad(name, 8);
  out += pad("Time", 9) + "Best LB\n";

  char shape[64];
  std::snprintf(shape, sizeof shape, "(%zu,%d,%zu)", r.instance.variables, r.instance.max_domain,
                r.instance.evidence);
  out += pad(shape, 16);
  std::string exact = "-";
  if (r.proven_zero) {
    exact = "0";
  } else if (r.exact && r.exact->log_pe) {
    exact = format_probability(*r.exact->log_pe);
  }
  out += pad(exact, 12);

  LogProb best = LogProb::zero();
  bool any = false;
  double time = 0.0;
  for (const auto& [h, name] : columns) {
    const HeuristicReport* b = find(h);
    std::string cell = "-";
    if (b) {
      if (b->delta) cell = format_fixed(*b->delta, 3);
      best = any ? std::max(best, b->result.log_bound) : b->result.log_bound;
      any = true;
      time += b->time_seconds;
    }
    out += pad(cell, 8);
  }
  out += pad(r.spec.record_timing ? format_fixed(time, 1) : "-", 9);
  out += (any ? format_probability(best) : std::string("-")) + "\n";

  if (!r.bounds.empty()) {
    out += "\n" + pad("heuristic", 11) + pad("lower bound", 14) + pad("log bound", 16) + "confidence\n";
    for (const auto& b : r.bounds) {
      const LowerBoundResult& res = b.result;
      out += pad(std::string(heuristic_tag(b.heuristic)), 11) + pad(format_probability(res.log_bound), 14) +
             pad(res.trivial() ? std::string("-inf") : format_fixed(res.log_bound.log(), 6), 16) +
             format_fixed(res.confidence, 7) + (res.timed_out ? " (time limit)" : "") + "\n";
    }
  }
  out += "status: " + std::string(status_tag(r.status));
  if (!r.message.empty()) out += " (" + r.message + ")";
  out += "\n";
  return out;
}

}  // namespace

std::string_view engine_tag(Engine e) { return e == Engine::importance ? "importance" : "samplesearch"; }
std::string_view proposal_tag(ProposalKind p) { return p == ProposalKind::prior ? "prior" : "bp"; }
std::string_view exact_tag(ExactMethod m) {
  switch (m) {
    case ExactMethod::off: return "off";
    case ExactMethod::ve: return "ve";
    case ExactMethod::brute: return "brute";
  }
  return "?";
}

Engine parse_engine(std::string_view s) {
  if (s == "importance") return Engine::importance;
  if (s == "samplesearch") return Engine::samplesearch;
  throw InvalidArgument("unknown engine '" + std::string(s) + "'");
}

ProposalKind parse_proposal(std::string_view s) {
  if (s == "prior") return ProposalKind::prior;
  if (s == "bp") return ProposalKind::bp;
  throw InvalidArgument("unknown proposal '" + std::string(s) + "'");
}

ExactMethod parse_exact(std::string_view s) {
  if (s == "off") return ExactMethod::off;
  if (s == "ve") return ExactMethod::ve;
  if (s == "brute") return ExactMethod::brute;
  throw InvalidArgument("unknown exact method '" + std::string(s) + "'");
}

std::string_view status_tag(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::cap_exceeded: return "cap_exceeded";
    case RunStatus::time_limit: return "time_limit";
    case RunStatus::unsatisfiable: return "unsatisfiable";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  BoundParams{alpha, k, samples, Heuristic::average, order_form}.validate();
  if (time_limit_seconds && !(*time_limit_seconds > 0.0)) throw InvalidArgument("time limit must be positive");
  if (state_cap == 0 || factor_cap == 0) throw InvalidArgument("caps must be positive");
  if (workers < 1) throw InvalidArgument("workers must be positive");
  if (bp.iterations < 1) throw InvalidArgument("BP iterations must be at least 1");
  if (!(bp.damping >= 0.0 && bp.damping < 1.0)) throw InvalidArgument("BP damping must lie in [0, 1)");
  if (!(bp.floor > 0.0)) throw InvalidArgument("BP floor must be positive");
}

int Report::exit_code() const {
  switch (status) {
    case RunStatus::ok: return 0;
    case RunStatus::cap_exceeded:
    case RunStatus::time_limit: return 3;
    case RunStatus::unsatisfiable: return 4;
  }
  return 1;
}

Report run_experiment(const ExperimentSpec& spec) {
  const BeliefNetwork bn = load_model(spec.model_path);
  const Evidence e = spec.evidence_path.empty() ? Evidence() : load_evidence(bn, spec.evidence_path);
  return run_experiment(bn, e, spec);
}

Report run_experiment(const BeliefNetwork& bn, const Evidence& e, const ExperimentSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (spec.time_limit_seconds)
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(*spec.time_limit_seconds));

  Report r;
  r.spec = spec;
  r.instance.variables = bn.size();
  r.instance.max_domain = bn.max_cardinality();
  r.instance.evidence = e.size();
  auto finish = [&]() -> Report {
    r.total_time_seconds = spec.record_timing ? seconds_since(start) : 0.0;
    return std::move(r);
  };

  if (spec.exact != ExactMethod::off) {
    ExactReport ex;
    ex.method = spec.exact;
    const auto t0 = Clock::now();
    try {
      ex.log_pe = spec.exact == ExactMethod::ve ? variable_elimination_pe(bn, e, spec.factor_cap)
                                                : brute_force_pe(bn, e, spec.state_cap);
    } catch (const CapExceeded& cap) {
      ex.error = cap.what();
      r.status = RunStatus::cap_exceeded;
      r.message = std::string("exact: ") + cap.what();
    }
    ex.time_seconds = spec.record_timing ? seconds_since(t0) : 0.0;
    r.exact = ex;
    if (ex.log_pe && ex.log_pe->is_zero()) {
      r.proven_zero = true;
      r.status = RunStatus::unsatisfiable;
      r.message = "exact inference gives P(e) = 0";
      return finish();
    }
  }

  const FactoredProposal q =
      spec.proposal == ProposalKind::prior ? build_prior_proposal(bn, e) : build_bp_proposal(bn, e, spec.bp);
  r.instance.context_bound = q.context_bound();

  std::optional<ConstraintNetwork> cn;
  if (spec.engine == Engine::samplesearch) {
    cn.emplace(extract_constraints(bn, e));
    r.instance.relations = cn->relations().size();
    ExtendabilityOracle oracle(*cn, std::vector<int>(q.ordering().begin(), q.ordering().end()));
    if (cn->has_empty_relation() || !oracle.is_extendable(q.clamps())) {
      r.proven_zero = true;
      r.status = RunStatus::unsatisfiable;
      r.message = "no assignment satisfies the constraints; P(e) = 0";
      return finish();
    }
  }

  const std::optional<LogProb> exact_value = r.exact ? r.exact->log_pe : std::nullopt;
  const bool delta_defined = exact_value && !exact_value->is_zero() && exact_value->log() < 0.0;
  const LogProb exact_lp = exact_value.value_or(LogProb::zero());
  const ConstraintNetwork* cn_ptr = cn ? &*cn : nullptr;
  const RngStream master(spec.seed);
  for (Heuristic h : spec.heuristics) {
    HeuristicReport hr;
    hr.heuristic = h;
    const BoundParams params{spec.alpha, spec.k, spec.samples, h, spec.order_form};
    const auto t0 = Clock::now();
    SampleSourceFactory factory = [&bn, &e, &q, cn_ptr]() -> SampleSource {
      auto sampler = std::make_shared<WeightedSampler>(bn, e, q, cn_ptr);
      return [sampler](RngStream& rng) { return sampler->draw(rng); };
    };
    try {
      hr.result = run_markov_lb(factory, params, master.derive(heuristic_tag(h)),
                                RunOptions{deadline, spec.workers});
    } catch (const Unsatisfiable& ex) {
      r.proven_zero = true;
      r.status = RunStatus::unsatisfiable;
      r.message = ex.what();
      r.bounds.clear();
      return finish();
    }
    hr.time_seconds = spec.record_timing ? seconds_since(t0) : 0.0;
    if (delta_defined && !hr.result.trivial())
      hr.delta = log_relative_error(exact_lp, hr.result.log_bound);
    if (hr.result.timed_out && r.status == RunStatus::ok) {
      r.status = RunStatus::time_limit;
      r.message = "time limit reached; bounds use the completed repetitions";
    }
    r.bounds.push_back(std::move(hr));
  }
  if (spec.self_check && delta_defined) r.self_check_delta = log_relative_error(exact_lp, exact_lp);
  return finish();
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::json) return report_to_json(report).dump() + "\n";
  return emit_table(report);
}

Report parse_report_json(std::string_view text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed report: ") + ex.what());
  }
}

std::string format_probability(LogProb p) {
  if (p.is_zero()) return "0";
  const double log10v = p.log() / std::log(10.0);
  double exponent = std::floor(log10v);
  double mantissa = std::pow(10.0, log10v - exponent);
  if (mantissa >= 9.95) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1fE%s%02d", mantissa, exponent < 0 ? "-" : "+",
                static_cast<int>(std::abs(exponent)));
  return buf;
}

}  // namespace mlb
