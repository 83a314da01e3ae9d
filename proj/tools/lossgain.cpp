// Command-line front end: lossgain {simulate|verify|scan|qes} [--config FILE] [overrides]

#include "lossgain/commands.hpp"
#include "lossgain/errors.hpp"
#include "lossgain/io.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> model;
  std::optional<double> t_end, rtol, atol, sample_dt;
  std::optional<std::string> csv, json;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> inject_fault;
  std::optional<std::string> verify_case;
  std::optional<double> amplitude;
  std::optional<int> n, p;
  std::optional<double> atilde, btilde;
  std::optional<std::string> method;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON configuration file");
  cmd->add_option("--csv", o.csv, "CSV output path");
  cmd->add_option("--json", o.json, "JSON report path");
  cmd->add_option("--seed", o.seed, "Seed for sampled suites");
  cmd->add_flag("-q,--quiet", o.quiet, "Do not print the report to stdout");
}

lossgain::Json merged_tree(const std::string& command, const Overrides& o) {
  using lossgain::Json;
  Json tree = o.config.empty() ? Json::object() : lossgain::load_json_file(o.config);
  tree["command"] = command;
  if (o.model) {
    if (tree.contains("model") && tree["model"].is_object())
      tree["model"]["name"] = *o.model;
    else
      tree["model"] = *o.model;
  }
  if (o.t_end) tree["t_end"] = *o.t_end;
  if (o.rtol) tree["integrator"]["rtol"] = *o.rtol;
  if (o.atol) tree["integrator"]["atol"] = *o.atol;
  if (o.sample_dt) tree["integrator"]["sample_dt"] = *o.sample_dt;
  if (o.csv) tree["output"]["csv"] = *o.csv;
  if (o.json) tree["output"]["json"] = *o.json;
  if (o.seed) tree["seed"] = *o.seed;
  if (o.threads) tree["threads"] = *o.threads;
  if (o.inject_fault) tree["inject_fault"] = *o.inject_fault;
  if (o.verify_case) tree["case"] = *o.verify_case;
  if (o.amplitude) tree["amplitude"] = *o.amplitude;
  if (o.n) tree["qes"]["n"] = *o.n;
  if (o.p) tree["qes"]["p"] = *o.p;
  if (o.atilde) tree["qes"]["atilde"] = *o.atilde;
  if (o.btilde) tree["qes"]["btilde"] = *o.btilde;
  if (o.method) tree["qes"]["method"] = *o.method;
  return tree;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced loss-gain systems: simulation, verification, window scans and the QES sector"};
  app.require_subcommand(1);
  Overrides o;

  auto* sim = app.add_subcommand("simulate", "Integrate a catalog model; writes trajectory CSV and drift report");
  add_common(sim, o);
  sim->add_option("--model", o.model, "Catalog model name");
  sim->add_option("--t-end", o.t_end, "Final time");
  sim->add_option("--rtol", o.rtol, "Relative tolerance");
  sim->add_option("--atol", o.atol, "Absolute tolerance");
  sim->add_option("--sample-dt", o.sample_dt, "Output sampling interval (0: every step)");

  auto* ver = app.add_subcommand("verify", "Run the structural, involution, gauge, closed-form and QES suites");
  add_common(ver, o);
  ver->add_option("--inject-fault", o.inject_fault, "Corrupt a component on purpose")->check(CLI::IsMember({"structural"}));
  ver->add_option("--case", o.verify_case, "Report on a single closed-form case (trans-cn, rot-II-sn, ...)");
  ver->add_option("--amplitude", o.amplitude, "Amplitude for --case");

  auto* scan = app.add_subcommand("scan", "Sweep parameters and classify each grid point");
  add_common(scan, o);
  scan->add_option("--model", o.model, "Catalog model name");
  scan->add_option("--threads", o.threads, "Worker threads (0: all cores)");

  auto* qes = app.add_subcommand("qes", "Spectrum and eigenfunctions of the sextic QES problem");
  add_common(qes, o);
  qes->add_option("--n", o.n, "Polynomial degree");
  qes->add_option("--p", o.p, "Parity index (0 or 1)");
  qes->add_option("--atilde", o.atilde, "Quartic coefficient of the exponent");
  qes->add_option("--btilde", o.btilde, "Quadratic coefficient of the exponent");
  qes->add_option("--method", o.method, "eigen or determinant-roots");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  lossgain::CommandResult result;
  try {
    const lossgain::RunConfig config = lossgain::parse_run_config(merged_tree(command, o));
    result = lossgain::run_command(config);
    if (!config.json_path.empty()) lossgain::write_json_file(config.json_path, result.report);
  } catch (const lossgain::SpecError& e) {
    std::cerr << "lossgain " << command << ": " << e.what() << '\n';
    return lossgain::exit_bad_config;
  } catch (const lossgain::RangeError& e) {
    std::cerr << "lossgain " << command << ": outside window (" << e.gate() << "): " << e.what() << '\n';
    return lossgain::exit_bad_config;
  } catch (const std::exception& e) {
    std::cerr << "lossgain " << command << ": " << e.what() << '\n';
    return lossgain::exit_bad_config;
  }
  if (!o.quiet) std::cout << result.report.dump(2) << '\n';
  return result.exit_code;
}
