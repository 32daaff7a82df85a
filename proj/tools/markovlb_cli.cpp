#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "markovlb/markovlb.h"

namespace {

constexpr int kExitUsage = 2;

struct StringDeleter {
  void operator()(char* s) const { mlb_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

int exit_for(mlb_status status) {
  switch (status) {
    case MLB_OK: return 0;
    case MLB_ERR_INVALID_ARGUMENT:
    case MLB_ERR_PARSE: return kExitUsage;
    case MLB_ERR_CAP_EXCEEDED: return 3;
    case MLB_ERR_UNSATISFIABLE: return 4;
    case MLB_ERR_INTERNAL: break;
  }
  return 1;
}

int fail(mlb_status status) {
  std::cerr << "markovlb: " << mlb_last_error() << '\n';
  return exit_for(status);
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) {
    std::cerr << "markovlb: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

struct RunArgs {
  std::string model;
  std::string evidence;
  std::string engine = "importance";
  std::string proposal = "prior";
  std::string heuristic = "all";
  double alpha = 2.0;
  int k = 7;
  int samples = 100;
  std::uint64_t seed = 0;
  std::string exact = "off";
  std::string format = "table";
  std::optional<double> time_limit;
  std::optional<int> bp_iters;
  std::optional<double> bp_damping;
  std::optional<double> bp_floor;
  std::optional<std::uint64_t> state_cap;
  std::optional<std::uint64_t> factor_cap;
  int workers = 1;
  std::string order_form = "per_term";
  bool no_timing = false;
  bool self_check = false;
  std::string export_cnf;
};

struct GenerateArgs {
  std::string kind = "random";
  int n = 20;
  int domain = 2;
  double zero_fraction = 0.3;
  int evidence_count = 5;
  int roots = 30;
  int leaves = 24;
  int parents = 3;
  std::uint64_t seed = 0;
  std::string out_model;
  std::string out_evidence;
};

int export_constraints(const RunArgs& a) {
  mlb_network* net = nullptr;
  if (mlb_status s = mlb_network_load(a.model.c_str(), &net); s != MLB_OK) return fail(s);
  std::unique_ptr<mlb_network, decltype(&mlb_network_free)> net_guard(net, mlb_network_free);
  mlb_evidence* ev = nullptr;
  if (a.evidence.empty()) {
    ev = mlb_evidence_empty();
  } else if (mlb_status s = mlb_evidence_load(net, a.evidence.c_str(), &ev); s != MLB_OK) {
    return fail(s);
  }
  std::unique_ptr<mlb_evidence, decltype(&mlb_evidence_free)> ev_guard(ev, mlb_evidence_free);
  char* cnf = nullptr;
  if (mlb_status s = mlb_export_cnf(net, ev, &cnf); s != MLB_OK) return fail(s);
  OwnedString owned(cnf);
  return write_file(a.export_cnf, cnf) ? 0 : 1;
}

int run(const RunArgs& a) {
  if (a.format != "json" && a.format != "table") {
    std::cerr << "markovlb: --format must be json or table\n";
    return kExitUsage;
  }
  if (!a.export_cnf.empty()) {
    if (int code = export_constraints(a); code != 0) return code;
  }

  std::unique_ptr<mlb_experiment, decltype(&mlb_experiment_free)> exp(mlb_experiment_create(),
                                                                      mlb_experiment_free);
  if (!exp) {
    std::cerr << "markovlb: out of memory\n";
    return 1;
  }
  // Reals go through %.17g so the library sees the exact value typed.
  auto real = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::vector<std::pair<std::string, std::string>> settings = {
      {"model", a.model},
      {"evidence", a.evidence},
      {"engine", a.engine},
      {"proposal", a.proposal},
      {"heuristic", a.heuristic},
      {"alpha", real(a.alpha)},
      {"k", std::to_string(a.k)},
      {"samples", std::to_string(a.samples)},
      {"seed", std::to_string(a.seed)},
      {"exact", a.exact},
      {"workers", std::to_string(a.workers)},
      {"order_form", a.order_form},
      {"record_timing", a.no_timing ? "false" : "true"},
      {"self_check", a.self_check ? "true" : "false"},
  };
  if (a.time_limit) settings.emplace_back("time_limit", real(*a.time_limit));
  if (a.bp_iters) settings.emplace_back("bp_iters", std::to_string(*a.bp_iters));
  if (a.bp_damping) settings.emplace_back("bp_damping", real(*a.bp_damping));
  if (a.bp_floor) settings.emplace_back("bp_floor", real(*a.bp_floor));
  if (a.state_cap) settings.emplace_back("state_cap", std::to_string(*a.state_cap));
  if (a.factor_cap) settings.emplace_back("factor_cap", std::to_string(*a.factor_cap));
  for (const auto& [key, value] : settings) {
    if (mlb_status s = mlb_experiment_set(exp.get(), key.c_str(), value.c_str()); s != MLB_OK)
      return fail(s);
  }

  mlb_report* raw = nullptr;
  const mlb_status status = mlb_experiment_run(exp.get(), &raw);
  if (!raw) return fail(status);
  std::unique_ptr<mlb_report, decltype(&mlb_report_free)> report(raw, mlb_report_free);
  char* text = nullptr;
  if (mlb_status s = mlb_report_render(report.get(), a.format.c_str(), &text); s != MLB_OK) return fail(s);
  OwnedString owned(text);
  std::fputs(text, stdout);
  if (status != MLB_OK) std::cerr << "markovlb: " << mlb_last_error() << '\n';
  return exit_for(status);
}

int generate(const GenerateArgs& g) {
  char* model = nullptr;
  char* evidence = nullptr;
  mlb_status s = g.kind == "random"
                     ? mlb_generate_random(g.n, g.domain, g.zero_fraction, g.evidence_count, g.seed, &model,
                                           &evidence)
                     : mlb_generate_two_layer(g.roots, g.leaves, g.parents, g.seed, &model, &evidence);
  if (s != MLB_OK) return fail(s);
  OwnedString model_owned(model);
  OwnedString evidence_owned(evidence);
  if (!write_file(g.out_model, model)) return 1;
  if (!g.out_evidence.empty() && !write_file(g.out_evidence, evidence)) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-confidence lower bounds on P(e) for discrete Bayesian networks"};
  app.set_version_flag("--version", std::string(mlb_version()));

  RunArgs a;
  app.add_option("--model", a.model, "Model file in UAI BAYES format");
  app.add_option("--evidence", a.evidence, "Evidence file in UAI evidence format");
  app.add_option("--engine", a.engine, "Sampling engine")
      ->check(CLI::IsMember({"importance", "samplesearch"}))
      ->capture_default_str();
  app.add_option("--proposal", a.proposal, "Proposal distribution")
      ->check(CLI::IsMember({"prior", "bp"}))
      ->capture_default_str();
  app.add_option("--heuristic", a.heuristic, "min, avg, max, perm, ord, all, or a comma list")
      ->capture_default_str();
  app.add_option("--alpha", a.alpha, "Markov inequality amplification, > 1")->capture_default_str();
  app.add_option("--k", a.k, "Independent repetitions")->capture_default_str();
  app.add_option("--samples", a.samples, "Samples per repetition")->capture_default_str();
  app.add_option("--seed", a.seed, "Master seed")->capture_default_str();
  app.add_option("--exact", a.exact, "Exact P(e) oracle")
      ->check(CLI::IsMember({"off", "ve", "brute"}))
      ->capture_default_str();
  app.add_option("--format", a.format, "Report format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  app.add_option("--time-limit", a.time_limit, "Wall-clock limit in seconds");
  app.add_option("--bp-iters", a.bp_iters, "BP iterations");
  app.add_option("--bp-damping", a.bp_damping, "BP damping in [0, 1)");
  app.add_option("--bp-floor", a.bp_floor, "Minimum proposal probability");
  app.add_option("--state-cap", a.state_cap, "Joint state limit for brute-force enumeration");
  app.add_option("--factor-cap", a.factor_cap, "Factor size limit for variable elimination");
  app.add_option("--workers", a.workers, "Worker threads per bound")->capture_default_str();
  app.add_option("--order-form", a.order_form, "Order-statistics estimator form")
      ->check(CLI::IsMember({"per_term", "single_division"}))
      ->capture_default_str();
  app.add_flag("--no-timing", a.no_timing, "Omit wall-clock fields from the report");
  app.add_flag("--self-check", a.self_check, "Report the relative error of the exact value against itself");
  app.add_option("--export-cnf", a.export_cnf, "Also write the constraint network as DIMACS CNF");

  GenerateArgs g;
  CLI::App* gen = app.add_subcommand("generate", "Write a random instance");
  gen->add_option("--kind", g.kind, "Network family")
      ->check(CLI::IsMember({"random", "two-layer"}))
      ->capture_default_str();
  gen->add_option("--n", g.n, "Variables (random)")->capture_default_str();
  gen->add_option("--domain", g.domain, "Maximum domain size (random)")->capture_default_str();
  gen->add_option("--zero-fraction", g.zero_fraction, "Fraction of zero CPT entries (random)")
      ->capture_default_str();
  gen->add_option("--evidence-count", g.evidence_count, "Observed variables (random)")->capture_default_str();
  gen->add_option("--roots", g.roots, "Root variables (two-layer)")->capture_default_str();
  gen->add_option("--leaves", g.leaves, "Observed leaves (two-layer)")->capture_default_str();
  gen->add_option("--parents", g.parents, "Parents per leaf (two-layer)")->capture_default_str();
  gen->add_option("--seed", g.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out-model", g.out_model, "Model output path")->required();
  gen->add_option("--out-evidence", g.out_evidence, "Evidence output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (gen->parsed()) return generate(g);
  if (a.model.empty()) {
    std::cerr << "markovlb: --model is required\n";
    return kExitUsage;
  }
  return run(a);
}
