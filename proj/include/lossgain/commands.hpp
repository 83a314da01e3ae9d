#pragma once

// Command layer behind the CLI: configuration parsing, model construction
// from the catalog and the simulate / verify / scan / qes reports.

#include "lossgain/closed_forms.hpp"
#include "lossgain/dynamics.hpp"
#include "lossgain/io.hpp"
#include "lossgain/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lossgain {

enum ExitCode : int { exit_ok = 0, exit_suite_failed = 1, exit_bad_config = 2, exit_trajectory_aborted = 3 };

struct RunConfig {
  std::string command;
  std::string model = "quartic_translational";
  Json model_params = Json::object();
  Json initial;  // null when absent
  IntegratorConfig integrator;
  double t_end = 100.0;
  std::string csv_path;   // empty: no CSV
  std::string json_path;  // empty: report goes to stdout only
  std::uint64_t seed = 20240601;
  int threads = 0;  // 0: hardware concurrency
  Json scan = Json::object();
  Json qes = Json::object();
  std::string inject_fault;  // "structural" corrupts D in the verify structural suite
  std::string verify_case;   // verify only this closed-form case
  double amplitude = 0.0;    // > 0 overrides the reference amplitude for verify_case
};

// Reads the documented key tree; unknown top-level keys are rejected.
RunConfig parse_run_config(const Json& tree);

QuarticTranslationalParams parse_quartic_params(const Json& params);
RotationalParams parse_rotational_params(const Json& params, RadialProfile profile);
CalogeroParams parse_calogero_params(const Json& params);
SexticQesParams parse_qes_params(const Json& params);

// Catalog lookup; "pairs" and "coupling" select the multi-pair variants.
SystemSpec build_model(const std::string& name, const Json& params);

// Explicit (chart, q, v) or {"closed_form": case, "A": amplitude}.
PhaseState build_initial_state(const RunConfig& config, const SystemSpec& spec);

// Parameter sets inside each closed-form window, used by verify and the tests.
struct ReferenceCase {
  SolutionCase kind = SolutionCase::trans_cn;
  QuarticTranslationalParams trans;
  RotationalParams rot;
  double A = 1.0;
};

std::vector<ReferenceCase> reference_cases();
EllipticSolutionParams make_solution(const ReferenceCase& rc, EllipticReading reading = EllipticReading::modulus);
SystemSpec reference_system(const ReferenceCase& rc);

struct SuiteResult {
  std::string name;
  bool passed = false;
  Json detail;
};

SuiteResult structural_suite(std::uint64_t seed, bool inject_fault);
SuiteResult involution_suite_all(std::uint64_t seed);
SuiteResult gauge_suite();
SuiteResult closed_form_suite();
SuiteResult qes_suite(std::uint64_t seed);

// Residual, convention, period and stability report for one closed-form case.
// Model parameters come from the config when the model matches the case,
// otherwise from the reference table.
SuiteResult closed_form_case_report(const RunConfig& config, SolutionCase kind);

struct CommandResult {
  int exit_code = exit_ok;
  Json report;
};

CommandResult run_simulate(const RunConfig& config);
CommandResult run_verify(const RunConfig& config);
CommandResult run_scan(const RunConfig& config);
CommandResult run_qes(const RunConfig& config);
CommandResult run_command(const RunConfig& config);

}  // namespace lossgain
