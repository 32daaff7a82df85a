#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "markovlb/markovlb.h"

namespace {

const char* kChain =
    "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n"
    "2 0.6 0.4\n"
    "4 0.8 0.2 0.1 0.9\n";

std::string take(char* s) {
  std::string out = s ? s : "";
  mlb_string_free(s);
  return out;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("mlb_capi_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("network and evidence handles") {
  mlb_network* net = nullptr;
  REQUIRE(mlb_network_parse(kChain, &net) == MLB_OK);
  CHECK(mlb_network_num_vars(net) == 2);

  char* text = nullptr;
  REQUIRE(mlb_network_serialize(net, &text) == MLB_OK);
  mlb_network* again = nullptr;
  CHECK(mlb_network_parse(text, &again) == MLB_OK);
  mlb_string_free(text);
  mlb_network_free(again);

  mlb_evidence* ev = nullptr;
  REQUIRE(mlb_evidence_parse(net, "1 1 1", &ev) == MLB_OK);
  char* ev_text = nullptr;
  REQUIRE(mlb_evidence_serialize(ev, &ev_text) == MLB_OK);
  CHECK(take(ev_text) == "1 1 1\n");

  double log_pe = 0.0;
  CHECK(mlb_exact_log_pe(net, ev, "ve", &log_pe) == MLB_OK);
  CHECK(std::abs(log_pe - std::log(0.48)) < 1e-12);
  CHECK(mlb_exact_log_pe(net, ev, "brute", &log_pe) == MLB_OK);
  CHECK(std::abs(log_pe - std::log(0.48)) < 1e-12);
  CHECK(mlb_exact_log_pe(net, ev, "magic", &log_pe) == MLB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mlb_last_error()).find("magic") != std::string::npos);

  mlb_evidence* empty = mlb_evidence_empty();
  CHECK(mlb_exact_log_pe(net, empty, "ve", &log_pe) == MLB_OK);
  CHECK(std::abs(log_pe) < 1e-12);

  char* cnf = nullptr;
  CHECK(mlb_export_cnf(net, ev, &cnf) == MLB_OK);
  CHECK(take(cnf).find("p cnf 4") != std::string::npos);

  mlb_evidence_free(empty);
  mlb_evidence_free(ev);
  mlb_network_free(net);
}

TEST_CASE("errors map to status codes") {
  mlb_network* net = nullptr;
  CHECK(mlb_network_parse("BAYES\n1\n2\n1\n1 0\n2 0.5 0.4\n", &net) == MLB_ERR_PARSE);
  CHECK(net == nullptr);
  CHECK(std::string(mlb_last_error()).find("row") != std::string::npos);
  CHECK(mlb_network_load("/nonexistent.uai", &net) == MLB_ERR_PARSE);
  CHECK(mlb_network_parse(nullptr, &net) == MLB_ERR_INVALID_ARGUMENT);

  REQUIRE(mlb_network_parse(kChain, &net) == MLB_OK);
  mlb_evidence* ev = nullptr;
  CHECK(mlb_evidence_parse(net, "1 0 5", &ev) == MLB_ERR_PARSE);
  mlb_network_free(net);

  mlb_experiment* exp = mlb_experiment_create();
  CHECK(mlb_experiment_set(exp, "alpha", "two") == MLB_ERR_INVALID_ARGUMENT);
  CHECK(mlb_experiment_set(exp, "nonsense", "1") == MLB_ERR_INVALID_ARGUMENT);
  CHECK(mlb_experiment_set(exp, "heuristic", "avg,bogus") == MLB_ERR_INVALID_ARGUMENT);
  mlb_report* report = nullptr;
  CHECK(mlb_experiment_run(exp, &report) == MLB_ERR_INVALID_ARGUMENT);
  CHECK(report == nullptr);
  mlb_experiment_free(exp);
}

TEST_CASE("experiments through the C interface") {
  const auto model = write_temp("chain.uai", kChain);
  const auto evidence = write_temp("chain.evid", "1 1 1\n");

  mlb_experiment* exp = mlb_experiment_create();
  REQUIRE(exp);
  CHECK(mlb_experiment_set(exp, "model", model.c_str()) == MLB_OK);
  CHECK(mlb_experiment_set(exp, "evidence", evidence.c_str()) == MLB_OK);
  CHECK(mlb_experiment_set(exp, "heuristic", "avg,ord") == MLB_OK);
  CHECK(mlb_experiment_set(exp, "exact", "brute") == MLB_OK);
  CHECK(mlb_experiment_set(exp, "samples", "30") == MLB_OK);
  CHECK(mlb_experiment_set(exp, "seed", "5") == MLB_OK);
  CHECK(mlb_experiment_set(exp, "record_timing", "false") == MLB_OK);

  mlb_report* report = nullptr;
  REQUIRE(mlb_experiment_run(exp, &report) == MLB_OK);
  CHECK(mlb_report_exit_code(report) == 0);
  double bound = 0.0;
  CHECK(mlb_report_log_bound(report, "avg", &bound) == MLB_OK);
  CHECK(bound <= std::log(0.48));
  CHECK(mlb_report_log_bound(report, "max", &bound) == MLB_ERR_INVALID_ARGUMENT);

  char* json = nullptr;
  REQUIRE(mlb_report_render(report, "json", &json) == MLB_OK);
  const std::string first = take(json);
  CHECK(first.find("\"confidence\":0.9921875") != std::string::npos);
  char* table = nullptr;
  REQUIRE(mlb_report_render(report, "table", &table) == MLB_OK);
  CHECK(take(table).find("Best LB") != std::string::npos);
  mlb_report_free(report);

  REQUIRE(mlb_experiment_run(exp, &report) == MLB_OK);
  REQUIRE(mlb_report_render(report, "json", &json) == MLB_OK);
  CHECK(take(json) == first);
  mlb_report_free(report);

  // A zero-probability evidence set proves P(e) = 0.
  const auto zero_model = write_temp("zero.uai",
                                     "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n2 0.5 0.5\n4 1.0 0.0 0.4 0.6\n");
  const auto zero_evidence = write_temp("zero.evid", "2 0 0 1 1\n");
  CHECK(mlb_experiment_set(exp, "model", zero_model.c_str()) == MLB_OK);
  CHECK(mlb_experiment_set(exp, "evidence", zero_evidence.c_str()) == MLB_OK);
  CHECK(mlb_experiment_run(exp, &report) == MLB_ERR_UNSATISFIABLE);
  REQUIRE(report);
  CHECK(mlb_report_exit_code(report) == 4);
  mlb_report_free(report);
  mlb_experiment_free(exp);

  for (const auto& p : {model, evidence, zero_model, zero_evidence}) std::filesystem::remove(p);
}

TEST_CASE("generators") {
  char* model = nullptr;
  char* evidence = nullptr;
  REQUIRE(mlb_generate_random(10, 3, 0.2, 3, 7, &model, &evidence) == MLB_OK);
  mlb_network* net = nullptr;
  CHECK(mlb_network_parse(model, &net) == MLB_OK);
  mlb_evidence* ev = nullptr;
  CHECK(mlb_evidence_parse(net, evidence, &ev) == MLB_OK);
  double log_pe = 0.0;
  CHECK(mlb_exact_log_pe(net, ev, "ve", &log_pe) == MLB_OK);
  CHECK(std::isfinite(log_pe));
  mlb_evidence_free(ev);
  mlb_network_free(net);
  mlb_string_free(model);
  mlb_string_free(evidence);

  REQUIRE(mlb_generate_two_layer(8, 6, 2, 1, &model, &evidence) == MLB_OK);
  CHECK(std::string(evidence).rfind("6 ", 0) == 0);
  mlb_string_free(model);
  mlb_string_free(evidence);
  CHECK(mlb_generate_two_layer(2, 3, 4, 1, &model, &evidence) == MLB_ERR_INVALID_ARGUMENT);
}
