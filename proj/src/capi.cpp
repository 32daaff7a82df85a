#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "constraints.hpp"
#include "exact.hpp"
#include "generator.hpp"
#include "harness.hpp"
#include "markovlb/markovlb.h"
#include "model.hpp"

struct mlb_network {
  mlb::BeliefNetwork bn;
};

struct mlb_evidence {
  std::vector<std::pair<int, int>> pairs;
};

struct mlb_experiment {
  mlb::ExperimentSpec spec;
};

struct mlb_report {
  mlb::Report report;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
mlb_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    last_error.clear();
    return MLB_OK;
  } catch (const mlb::Error& e) {
    last_error = e.what();
    return static_cast<mlb_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MLB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MLB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return MLB_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw mlb::InvalidArgument(std::string(what) + " must not be NULL");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mlb::Evidence bind(const mlb_network* net, const mlb_evidence* ev) {
  require(net, "network");
  if (!ev) return mlb::Evidence();
  return mlb::Evidence(net->bn, ev->pairs);
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE || !std::isfinite(v))
    throw mlb::InvalidArgument("'" + key + "' expects a number, got '" + value + "'");
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
  Int v{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || end != value.data() + value.size())
    throw mlb::InvalidArgument("'" + key + "' expects an integer, got '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw mlb::InvalidArgument("'" + key + "' expects true or false, got '" + value + "'");
}

std::vector<mlb::Heuristic> to_heuristics(const std::string& value) {
  if (value == "all") return mlb::kAllHeuristics;
  std::vector<mlb::Heuristic> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string tag = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const mlb::Heuristic h = mlb::parse_heuristic(tag);
    if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void apply(mlb::ExperimentSpec& s, const std::string& key, const std::string& value) {
  if (key == "model") s.model_path = value;
  else if (key == "evidence") s.evidence_path = value;
  else if (key == "engine") s.engine = mlb::parse_engine(value);
  else if (key == "proposal") s.proposal = mlb::parse_proposal(value);
  else if (key == "heuristic") s.heuristics = to_heuristics(value);
  else if (key == "alpha") s.alpha = to_double(key, value);
  else if (key == "k") s.k = to_int<int>(key, value);
  else if (key == "samples") s.samples = to_int<int>(key, value);
  else if (key == "order_form") {
    if (value == "per_term") s.order_form = mlb::OrderStatForm::per_term;
    else if (value == "single_division") s.order_form = mlb::OrderStatForm::single_division;
    else throw mlb::InvalidArgument("unknown order_form '" + value + "'");
  }
  else if (key == "seed") s.seed = to_int<std::uint64_t>(key, value);
  else if (key == "exact") s.exact = mlb::parse_exact(value);
  else if (key == "time_limit") s.time_limit_seconds = to_double(key, value);
  else if (key == "state_cap") s.state_cap = to_int<std::uint64_t>(key, value);
  else if (key == "factor_cap") s.factor_cap = to_int<std::uint64_t>(key, value);
  else if (key == "bp_iters") s.bp.iterations = to_int<int>(key, value);
  else if (key == "bp_damping") s.bp.damping = to_double(key, value);
  else if (key == "bp_floor") s.bp.floor = to_double(key, value);
  else if (key == "workers") s.workers = to_int<int>(key, value);
  else if (key == "record_timing") s.record_timing = to_bool(key, value);
  else if (key == "self_check") s.self_check = to_bool(key, value);
  else throw mlb::InvalidArgument("unknown experiment key '" + key + "'");
}

void write_instance(const mlb::GeneratedInstance& inst, char** model_text, char** evidence_text) {
  require(model_text, "model_text");
  require(evidence_text, "evidence_text");
  char* m = duplicate(mlb::serialize_model(inst.network));
  try {
    *evidence_text = duplicate(mlb::serialize_evidence(inst.evidence));
  } catch (...) {
    std::free(m);
    throw;
  }
  *model_text = m;
}

}  // namespace

extern "C" {

const char* mlb_version(void) { return "1.0.0"; }

const char* mlb_last_error(void) { return last_error.c_str(); }

void mlb_string_free(char* s) { std::free(s); }

mlb_status mlb_network_parse(const char* text, mlb_network** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    *out = new mlb_network{mlb::parse_model(text)};
  });
}

mlb_status mlb_network_load(const char* path, mlb_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new mlb_network{mlb::load_model(path)};
  });
}

void mlb_network_free(mlb_network* net) { delete net; }

size_t mlb_network_num_vars(const mlb_network* net) { return net ? net->bn.size() : 0; }

mlb_status mlb_network_serialize(const mlb_network* net, char** out) {
  return guarded([&] {
    require(net, "network");
    require(out, "out");
    *out = duplicate(mlb::serialize_model(net->bn));
  });
}

mlb_status mlb_evidence_parse(const mlb_network* net, const char* text, mlb_evidence** out) {
  return guarded([&] {
    require(net, "network");
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    const mlb::Evidence e = mlb::parse_evidence(net->bn, text);
    *out = new mlb_evidence{{e.pairs().begin(), e.pairs().end()}};
  });
}

mlb_status mlb_evidence_load(const mlb_network* net, const char* path, mlb_evidence** out) {
  return guarded([&] {
    require(net, "network");
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    const mlb::Evidence e = mlb::load_evidence(net->bn, path);
    *out = new mlb_evidence{{e.pairs().begin(), e.pairs().end()}};
  });
}

mlb_evidence* mlb_evidence_empty(void) { return new (std::nothrow) mlb_evidence{}; }

void mlb_evidence_free(mlb_evidence* ev) { delete ev; }

mlb_status mlb_evidence_serialize(const mlb_evidence* ev, char** out) {
  return guarded([&] {
    require(ev, "evidence");
    require(out, "out");
    std::string s = std::to_string(ev->pairs.size());
    for (const auto& [var, val] : ev->pairs) s += ' ' + std::to_string(var) + ' ' + std::to_string(val);
    *out = duplicate(s + '\n');
  });
}

mlb_status mlb_exact_log_pe(const mlb_network* net, const mlb_evidence* ev, const char* method,
                            double* out) {
  return guarded([&] {
    require(method, "method");
    require(out, "out");
    const mlb::Evidence e = bind(net, ev);
    const mlb::ExactMethod m = mlb::parse_exact(method);
    if (m == mlb::ExactMethod::off) throw mlb::InvalidArgument("exact method must be ve or brute");
    const mlb::LogProb p = m == mlb::ExactMethod::ve ? mlb::variable_elimination_pe(net->bn, e)
                                                     : mlb::brute_force_pe(net->bn, e);
    *out = p.log();
  });
}

mlb_status mlb_export_cnf(const mlb_network* net, const mlb_evidence* ev, char** out) {
  return guarded([&] {
    require(out, "out");
    const mlb::Evidence e = bind(net, ev);
    *out = duplicate(mlb::export_dimacs(mlb::extract_constraints(net->bn, e)));
  });
}

mlb_status mlb_generate_random(int n, int max_domain, double zero_fraction, int evidence_count,
                               uint64_t seed, char** model_text, char** evidence_text) {
  return guarded([&] {
    write_instance(mlb::generate_random_network(n, max_domain, zero_fraction, evidence_count, seed),
                   model_text, evidence_text);
  });
}

mlb_status mlb_generate_two_layer(int roots, int leaves, int parents_per_leaf, uint64_t seed,
                                  char** model_text, char** evidence_text) {
  return guarded([&] {
    write_instance(mlb::generate_two_layer_network(roots, leaves, parents_per_leaf, seed), model_text,
                   evidence_text);
  });
}

mlb_experiment* mlb_experiment_create(void) { return new (std::nothrow) mlb_experiment{}; }

void mlb_experiment_free(mlb_experiment* exp) { delete exp; }

mlb_status mlb_experiment_set(mlb_experiment* exp, const char* key, const char* value) {
  return guarded([&] {
    require(exp, "experiment");
    require(key, "key");
    require(value, "value");
    mlb::ExperimentSpec updated = exp->spec;
    apply(updated, key, value);
    exp->spec = std::move(updated);
  });
}

mlb_status mlb_experiment_run(const mlb_experiment* exp, mlb_report** out) {
  int code = 0;
  const mlb_status status = guarded([&] {
    require(exp, "experiment");
    require(out, "out");
    *out = nullptr;
    if (exp->spec.model_path.empty()) throw mlb::InvalidArgument("experiment has no model path");
    *out = new mlb_report{mlb::run_experiment(exp->spec)};
    code = (*out)->report.exit_code();
  });
  if (status != MLB_OK) return status;
  if (code != 0) last_error = (*out)->report.message;
  return static_cast<mlb_status>(code);
}

void mlb_report_free(mlb_report* report) { delete report; }

mlb_status mlb_report_render(const mlb_report* report, const char* format, char** out) {
  return guarded([&] {
    require(report, "report");
    require(format, "format");
    require(out, "out");
    const std::string f = format;
    mlb::ReportFormat rf;
    if (f == "json") rf = mlb::ReportFormat::json;
    else if (f == "table") rf = mlb::ReportFormat::table;
    else throw mlb::InvalidArgument("unknown report format '" + f + "'");
    *out = duplicate(mlb::emit_report(report->report, rf));
  });
}

int mlb_report_exit_code(const mlb_report* report) { return report ? report->report.exit_code() : 1; }

mlb_status mlb_report_log_bound(const mlb_report* report, const char* heuristic, double* out) {
  return guarded([&] {
    require(report, "report");
    require(heuristic, "heuristic");
    require(out, "out");
    const mlb::Heuristic h = mlb::parse_heuristic(heuristic);
    for (const auto& b : report->report.bounds) {
      if (b.heuristic == h) {
        *out = b.result.log_bound.log();
        return;
      }
    }
    throw mlb::InvalidArgument("report has no bound for heuristic '" + std::string(heuristic) + "'");
  });
}

}  // extern "C"
