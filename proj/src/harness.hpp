#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bounds.hpp"
#include "exact.hpp"
#include "model.hpp"
#include "proposal.hpp"

namespace mlb {

enum class Engine { importance, samplesearch };
enum class ProposalKind { prior, bp };
enum class ExactMethod { off, ve, brute };
enum class ReportFormat { json, table };

std::string_view engine_tag(Engine e);
std::string_view proposal_tag(ProposalKind p);
std::string_view exact_tag(ExactMethod m);
Engine parse_engine(std::string_view s);
ProposalKind parse_proposal(std::string_view s);
ExactMethod parse_exact(std::string_view s);

inline const std::vector<Heuristic> kAllHeuristics = {
    Heuristic::min, Heuristic::average, Heuristic::max, Heuristic::martingale_permutation,
    Heuristic::martingale_order};

struct ExperimentSpec {
  std::string model_path;
  std::string evidence_path;  // empty for no evidence
  Engine engine = Engine::importance;
  ProposalKind proposal = ProposalKind::prior;
  std::vector<Heuristic> heuristics = kAllHeuristics;
  double alpha = 2.0;
  int k = 7;
  int samples = 100;
  OrderStatForm order_form = OrderStatForm::per_term;
  std::uint64_t seed = 0;
  ExactMethod exact = ExactMethod::off;
  std::optional<double> time_limit_seconds;
  std::uint64_t state_cap = kDefaultStateSpaceCap;
  std::uint64_t factor_cap = kDefaultFactorSizeCap;
  BpOptions bp;
  int workers = 1;
  // Wall-clock fields make reports differ between runs; leave them out to get
  // byte-identical output for a fixed spec.
  bool record_timing = true;
  // Also reports the log-relative error of the exact value against itself.
  bool self_check = false;

  void validate() const;
};

enum class RunStatus { ok, cap_exceeded, time_limit, unsatisfiable };
std::string_view status_tag(RunStatus s);

struct InstanceInfo {
  std::size_t variables = 0;
  int max_domain = 0;
  std::size_t evidence = 0;
  std::optional<std::size_t> relations;
  std::size_t context_bound = 0;
};

struct ExactReport {
  ExactMethod method = ExactMethod::off;
  std::optional<LogProb> log_pe;  // absent when the stage failed
  std::string error;
  double time_seconds = 0.0;
};

struct HeuristicReport {
  Heuristic heuristic = Heuristic::average;
  LowerBoundResult result;
  std::optional<double> delta;  // present iff exact P(e) in (0,1) and the bound is nonzero
  double time_seconds = 0.0;
};

struct Report {
  ExperimentSpec spec;
  InstanceInfo instance;
  std::optional<ExactReport> exact;
  bool proven_zero = false;  // P(e) = 0 established by search or exact inference
  std::vector<HeuristicReport> bounds;
  std::optional<double> self_check_delta;
  RunStatus status = RunStatus::ok;
  std::string message;
  double total_time_seconds = 0.0;

  // 0 ok, 3 cap or time limit hit, 4 P(e) = 0 proven.
  int exit_code() const;
};

// Loads the instance from the spec's paths; parse failures throw ParseError.
Report run_experiment(const ExperimentSpec& spec);
Report run_experiment(const BeliefNetwork& bn, const Evidence& e, const ExperimentSpec& spec);

std::string emit_report(const Report& report, ReportFormat format);
Report parse_report_json(std::string_view text);

// Scientific notation with two significant digits, valid below double range,
// e.g. "2.8E-13".
std::string format_probability(LogProb p);

}  // namespace mlb
