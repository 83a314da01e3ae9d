#include "lossgain/commands.hpp"

#include "lossgain/errors.hpp"
#include "lossgain/invariants.hpp"
#include "lossgain/qes.hpp"
#include "lossgain/rep_algebra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <thread>

namespace lossgain {

namespace {

double num(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw SpecError(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

int integer(const Json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw SpecError(std::string("config: '") + key + "' must be an integer");
  return v.get<int>();
}

std::string text(const Json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_string()) throw SpecError(std::string("config: '") + key + "' must be a string");
  return v.get<std::string>();
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw SpecError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw SpecError("config: unknown key '" + key + "' in " + where);
}

std::vector<double> numbers(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw SpecError(std::string("config: '") + key + "' must be an array");
  std::vector<double> out;
  for (const Json& v : j.at(key)) {
    if (!v.is_number()) throw SpecError(std::string("config: '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Chart chart_from_string(const std::string& s) {
  if (s == "x") return Chart::x;
  if (s == "z") return Chart::z;
  if (s == "polar") return Chart::polar;
  throw SpecError("config: unknown chart '" + s + "'");
}

Method method_from_string(const std::string& s) {
  if (s == "dopri54") return Method::dopri54;
  if (s == "rk4") return Method::rk4;
  throw SpecError("config: unknown integrator method '" + s + "'");
}

EllipticReading reading_from_string(const std::string& s) {
  if (s == "modulus") return EllipticReading::modulus;
  if (s == "parameter") return EllipticReading::parameter;
  throw SpecError("config: unknown elliptic reading '" + s + "'");
}

bool is_rotational_model(const std::string& name) {
  return name == "rotational_constant_g" || name == "rotational_linear_g";
}

RadialProfile profile_of(const std::string& name) {
  return name == "rotational_constant_g" ? RadialProfile::constant : RadialProfile::linear;
}

std::vector<std::string> coordinate_names(Chart chart, int pairs) {
  std::vector<std::string> out;
  for (int i = 1; i <= pairs; ++i) {
    const std::string s = std::to_string(i);
    switch (chart) {
      case Chart::x:
        out.push_back("x" + std::to_string(2 * i - 1));
        out.push_back("x" + std::to_string(2 * i));
        break;
      case Chart::z:
        out.push_back("zp" + s);
        out.push_back("zm" + s);
        break;
      case Chart::polar:
        out.push_back("r" + s);
        out.push_back("theta" + s);
        break;
    }
  }
  return out;
}

Json stats_json(const IntegratorStats& s) {
  return Json{{"steps", s.steps}, {"rejections", s.rejections}, {"rhs_evaluations", s.rhs_evaluations}};
}

}  // namespace

QuarticTranslationalParams parse_quartic_params(const Json& j) {
  reject_unknown(j, {"omega0_sq", "alpha0", "beta0", "a", "b", "gamma", "Pi", "pairs", "coupling"}, "model.params");
  QuarticTranslationalParams p;
  p.omega0_sq = num(j, "omega0_sq", p.omega0_sq);
  p.beta0 = num(j, "beta0", p.beta0);
  p.a = num(j, "a", p.a);
  p.b = num(j, "b", p.b);
  p.gamma = num(j, "gamma", p.gamma);
  p.Pi = num(j, "Pi", p.Pi);
  if (j.contains("alpha0") && j.at("alpha0").is_string()) {
    if (j.at("alpha0").get<std::string>() != "pure_quartic")
      throw SpecError("config: alpha0 must be a number or \"pure_quartic\"");
    p.alpha0 = p.alpha0_for_pure_quartic();
  } else {
    p.alpha0 = num(j, "alpha0", p.alpha0);
  }
  return p;
}

RotationalParams parse_rotational_params(const Json& j, RadialProfile profile) {
  reject_unknown(j, {"c", "omega0_sq", "alpha0", "gamma", "pairs", "coupling"}, "model.params");
  RotationalParams p;
  p.profile = profile;
  p.c = num(j, "c", p.c);
  p.omega0_sq = num(j, "omega0_sq", p.omega0_sq);
  p.alpha0 = num(j, "alpha0", p.alpha0);
  p.gamma = num(j, "gamma", p.gamma);
  return p;
}

CalogeroParams parse_calogero_params(const Json& j) {
  reject_unknown(j, {"m", "omega_sq", "g", "gamma", "q_coeffs", "collision_distance"}, "model.params");
  CalogeroParams p;
  p.m = integer(j, "m", p.m);
  p.omega_sq = num(j, "omega_sq", p.omega_sq);
  p.g = num(j, "g", p.g);
  p.gamma = num(j, "gamma", p.gamma);
  if (j.contains("q_coeffs")) p.q_coeffs = numbers(j, "q_coeffs");
  p.collision_distance = num(j, "collision_distance", p.collision_distance);
  return p;
}

SexticQesParams parse_qes_params(const Json& j) {
  reject_unknown(j, {"atilde", "btilde", "n", "p", "a", "b", "gamma", "method", "grid"}, "qes parameters");
  SexticQesParams p;
  p.atilde = num(j, "atilde", p.atilde);
  p.btilde = num(j, "btilde", p.btilde);
  p.n = integer(j, "n", p.n);
  p.p = integer(j, "p", p.p);
  p.a = num(j, "a", p.a);
  p.b = num(j, "b", p.b);
  p.gamma = num(j, "gamma", p.gamma);
  p.validate();
  return p;
}

SystemSpec build_model(const std::string& name, const Json& params) {
  const Json& j = params.is_null() ? Json::object() : params;
  if (name == "quartic_translational") {
    const int pairs = integer(j, "pairs", 1);
    const double coupling = num(j, "coupling", 0.0);
    const auto p = parse_quartic_params(j);
    return pairs == 1 && coupling == 0.0 ? quartic_translational(p) : translational_chain(pairs, p, coupling);
  }
  if (is_rotational_model(name)) {
    const int pairs = integer(j, "pairs", 1);
    const double coupling = num(j, "coupling", 0.0);
    const auto p = parse_rotational_params(j, profile_of(name));
    return pairs == 1 && coupling == 0.0 ? rotational_model(p) : rotational_chain(pairs, p, coupling);
  }
  if (name == "calogero_unidirectional") return calogero_unidirectional(parse_calogero_params(j));
  if (name == "sextic_qes") return sextic_qes_model(parse_qes_params(j)).system();
  throw SpecError("unknown model '" + name + "'");
}

RunConfig parse_run_config(const Json& tree) {
  reject_unknown(tree,
                 {"command", "model", "initial", "integrator", "t_end", "output", "seed", "threads", "scan", "qes",
                  "inject_fault", "case", "amplitude"},
                 "config");
  RunConfig c;
  c.command = text(tree, "command", "");
  if (tree.contains("model")) {
    const Json& m = tree.at("model");
    if (m.is_string()) {
      c.model = m.get<std::string>();
    } else {
      reject_unknown(m, {"name", "params"}, "model");
      c.model = text(m, "name", c.model);
      if (m.contains("params")) c.model_params = m.at("params");
    }
  }
  const auto names = catalog_names();
  if (std::find(names.begin(), names.end(), c.model) == names.end())
    throw SpecError("config: model '" + c.model + "' is not in the catalog");
  if (tree.contains("initial")) c.initial = tree.at("initial");
  if (tree.contains("integrator")) {
    const Json& ij = tree.at("integrator");
    reject_unknown(ij,
                   {"method", "rtol", "atol", "max_step", "initial_step", "fixed_step", "sample_dt", "max_steps",
                    "blow_up_threshold"},
                   "integrator");
    IntegratorConfig& ic = c.integrator;
    ic.method = method_from_string(text(ij, "method", to_string(ic.method)));
    ic.rtol = num(ij, "rtol", ic.rtol);
    ic.atol = num(ij, "atol", ic.atol);
    ic.max_step = num(ij, "max_step", ic.max_step);
    ic.initial_step = num(ij, "initial_step", ic.initial_step);
    ic.fixed_step = num(ij, "fixed_step", ic.fixed_step);
    ic.sample_dt = num(ij, "sample_dt", ic.sample_dt);
    ic.max_steps = static_cast<long>(num(ij, "max_steps", static_cast<double>(ic.max_steps)));
    ic.blow_up_threshold = num(ij, "blow_up_threshold", ic.blow_up_threshold);
  }
  c.integrator.validate();
  c.t_end = num(tree, "t_end", c.t_end);
  if (tree.contains("output")) {
    const Json& o = tree.at("output");
    reject_unknown(o, {"csv", "json"}, "output");
    c.csv_path = text(o, "csv", "");
    c.json_path = text(o, "json", "");
  }
  if (tree.contains("seed")) {
    const Json& sj = tree.at("seed");
    if (!sj.is_number_integer() || (sj.is_number_integer() && !sj.is_number_unsigned() && sj.get<std::int64_t>() < 0))
      throw SpecError("config: 'seed' must be a non-negative integer");
    c.seed = tree.at("seed").get<std::uint64_t>();
  }
  c.threads = integer(tree, "threads", 0);
  if (c.threads < 0) throw SpecError("config: 'threads' must be non-negative");
  if (tree.contains("scan")) c.scan = tree.at("scan");
  if (tree.contains("qes")) c.qes = tree.at("qes");
  c.inject_fault = text(tree, "inject_fault", "");
  if (!c.inject_fault.empty() && c.inject_fault != "structural")
    throw SpecError("config: unknown fault '" + c.inject_fault + "'");
  c.verify_case = text(tree, "case", "");
  if (!c.verify_case.empty()) solution_case_from_string(c.verify_case);
  c.amplitude = num(tree, "amplitude", 0.0);
  return c;
}

PhaseState build_initial_state(const RunConfig& config, const SystemSpec& spec) {
  const Json& j = config.initial;
  if (j.is_null()) throw SpecError("config: an initial state is required");
  if (j.contains("closed_form")) {
    reject_unknown(j, {"closed_form", "A", "reading"}, "initial");
    const SolutionCase kind = solution_case_from_string(text(j, "closed_form", ""));
    const double A = num(j, "A", 1.0);
    const EllipticReading reading = reading_from_string(text(j, "reading", "modulus"));
    if (is_translational(kind)) {
      if (config.model != "quartic_translational" || spec.pairs != 1)
        throw SpecError("config: closed form " + to_string(kind) + " needs the single-pair quartic_translational model");
      return initial_state(make_trans_solution(kind, parse_quartic_params(config.model_params), A, reading));
    }
    if (!is_rotational_model(config.model) || spec.pairs != 1)
      throw SpecError("config: closed form " + to_string(kind) + " needs a single-pair rotational model");
    return initial_state(
        make_rot_solution(kind, parse_rotational_params(config.model_params, profile_of(config.model)), A, reading));
  }
  reject_unknown(j, {"chart", "q", "v", "t"}, "initial");
  PhaseState s;
  s.chart = chart_from_string(text(j, "chart", "x"));
  s.t = num(j, "t", 0.0);
  s.q = numbers(j, "q");
  s.v = numbers(j, "v");
  if (static_cast<int>(s.q.size()) != spec.dof() || static_cast<int>(s.v.size()) != spec.dof())
    throw SpecError("config: initial q and v need " + std::to_string(spec.dof()) + " entries");
  return s;
}

std::vector<ReferenceCase> reference_cases() {
  QuarticTranslationalParams pos;  // w^2 > 0
  pos.omega0_sq = 1.0;
  pos.a = 0.5;
  pos.b = 0.3;
  pos.gamma = 0.4;
  pos.beta0 = 1.0;
  pos.alpha0 = pos.alpha0_for_pure_quartic();
  QuarticTranslationalParams soft = pos;
  soft.beta0 = -1.0;
  QuarticTranslationalParams neg = pos;  // w^2 < 0
  neg.omega0_sq = -1.0;

  RotationalParams lin{RadialProfile::linear, 0.5, 1.0, 1.0, 0.4};
  RotationalParams lin_soft{RadialProfile::linear, 0.5, 1.0, 0.02, 0.4};
  RotationalParams cst{RadialProfile::constant, 0.5, 1.0, 1.0, 0.4};

  return {{SolutionCase::trans_cn, pos, {}, 0.8},       {SolutionCase::trans_sn, soft, {}, 0.6},
          {SolutionCase::trans_dn, neg, {}, 1.25},      {SolutionCase::trans_cn2, neg, {}, 1.8},
          {SolutionCase::rot_I, {}, cst, 0.7},          {SolutionCase::rot_II_cn, {}, lin, 0.7},
          {SolutionCase::rot_II_sn, {}, lin_soft, 1.0}};
}

EllipticSolutionParams make_solution(const ReferenceCase& rc, EllipticReading reading) {
  return is_translational(rc.kind) ? make_trans_solution(rc.kind, rc.trans, rc.A, reading)
                                   : make_rot_solution(rc.kind, rc.rot, rc.A, reading);
}

SystemSpec reference_system(const ReferenceCase& rc) {
  return is_translational(rc.kind) ? quartic_translational(rc.trans) : rotational_model(rc.rot);
}

SuiteResult structural_suite(std::uint64_t seed, bool inject_fault) {
  SuiteResult out{"structural", true, Json::object()};
  QuarticTranslationalParams qp;
  qp.a = 0.7;
  qp.b = 0.4;
  qp.gamma = 0.6;
  CalogeroParams cp;
  cp.q_coeffs = {1.0, 0.5, 0.2};
  cp.gamma = 0.4;
  const std::vector<SystemSpec> models{quartic_translational(qp),
                                       rotational_model({RadialProfile::linear, 0.8, 1.0, 0.5, 0.5}),
                                       calogero_unidirectional(cp)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0), lift(0.2, 1.0);
  Json per_model = Json::array();
  for (const SystemSpec& spec : models) {
    std::map<std::string, double> worst;
    bool passed = true;
    for (int s = 0; s < 100; ++s) {
      std::vector<double> z(static_cast<std::size_t>(spec.dof()));
      for (int i = 0; i < spec.pairs; ++i) {
        const auto a = static_cast<std::size_t>(2 * i);
        z[a + 1] = box(rng);
        z[a] = spec.symmetry == Symmetry::rotational ? std::abs(z[a + 1]) + lift(rng) : box(rng);
      }
      const std::vector<double> x = pair_rotate(z);
      MatrixRep rep = build_matrix_rep(spec, x);
      if (inject_fault) {
        rep.D(0, 1) += 1e-3;
        rep.D(1, 0) += 1e-3;
      }
      const StructureReport r = verify_structure(rep, spec.gamma);
      passed = passed && r.all_passed();
      for (const auto& c : r.checks) worst[c.name] = std::max(worst[c.name], c.max_deviation);
    }
    Json checks = Json::object();
    for (const auto& [name, dev] : worst) checks[name] = dev;
    per_model.push_back({{"model", spec.name}, {"points", 100}, {"passed", passed}, {"max_deviation", checks}});
    out.passed = out.passed && passed;
  }
  out.detail = {{"tolerance", 1e-12}, {"fault_injected", inject_fault}, {"models", per_model}};
  return out;
}

SuiteResult involution_suite_all(std::uint64_t seed) {
  SuiteResult out{"involution", true, Json::array()};
  QuarticTranslationalParams qp;
  qp.a = 0.5;
  qp.b = 0.3;
  qp.gamma = 0.4;
  qp.beta0 = 0.8;
  qp.alpha0 = 0.2;
  InvolutionConfig cfg;
  cfg.seed = seed;
  for (int m = 1; m <= 3; ++m) {
    for (const SystemSpec& spec :
         {translational_chain(m, qp, 0.3), rotational_chain(m, {RadialProfile::linear, 0.5, 1.0, 0.6, 0.4}, 0.3),
          rotational_chain(m, {RadialProfile::constant, 0.5, 1.0, 0.6, 0.4}, 0.3)}) {
      const InvolutionReport r = involution_suite(spec, cfg);
      Json brackets = Json::array();
      for (const auto& b : r.brackets)
        brackets.push_back({{"a", b.a}, {"b", b.b}, {"max_abs", b.max_abs}, {"fd_discrepancy", b.max_fd_discrepancy}});
      out.detail.push_back({{"model", r.model},
                            {"pairs", r.pairs},
                            {"charges", r.charge_count},
                            {"samples", r.samples},
                            {"max_bracket", r.max_bracket},
                            {"passed", r.passed},
                            {"verdict", r.verdict},
                            {"brackets", brackets}});
      out.passed = out.passed && r.passed;
    }
  }
  return out;
}

SuiteResult gauge_suite() {
  SuiteResult out{"gauge_equivalence", true, Json::array()};
  QuarticTranslationalParams qp;
  qp.a = 0.5;
  qp.b = 0.3;
  qp.gamma = 0.4;
  qp.beta0 = 0.8;
  qp.alpha0 = 0.2;
  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  const std::vector<std::pair<SystemSpec, PhaseState>> cases{
      {quartic_translational(qp), PhaseState{0.0, Chart::z, {0.1, 0.3}, {0.2, -0.1}}},
      {rotational_model({RadialProfile::constant, 0.5, 1.0, 0.6, 0.4}),
       PhaseState{0.0, Chart::z, {0.8, 0.2}, {0.05, 0.1}}}};
  for (const auto& [spec, init] : cases) {
    const GaugeReport r = gauge_equivalence(spec, init, cfg, 10.0);
    Json d{{"model", r.model},
           {"t_end", r.t_end},
           {"L_vs_L1", r.max_standard_vs_plus},
           {"L_vs_L2", r.max_standard_vs_minus},
           {"L1_vs_L2", r.max_plus_vs_minus},
           {"rhs_difference", r.max_rhs_difference},
           {"routhian_deviation", r.routhian_deviation ? Json(*r.routhian_deviation) : Json(nullptr)},
           {"passed", r.passed},
           {"message", r.message}};
    out.detail.push_back(d);
    out.passed = out.passed && r.passed;
  }
  return out;
}

SuiteResult closed_form_suite() {
  SuiteResult out{"closed_form", true, Json::object()};
  Json cases = Json::array();
  for (const ReferenceCase& rc : reference_cases()) {
    if (rc.kind == SolutionCase::trans_dn || rc.kind == SolutionCase::rot_I) continue;
    const ConventionReport conv =
        resolve_convention(rc.kind, is_translational(rc.kind) ? &rc.trans : nullptr,
                           is_translational(rc.kind) ? nullptr : &rc.rot, rc.A);
    const bool passed = conv.passing.has_value();
    cases.push_back({{"case", to_string(rc.kind)},
                     {"A", rc.A},
                     {"residual_modulus_reading", conv.residual_modulus},
                     {"residual_parameter_reading", conv.residual_parameter},
                     {"passing_reading", passed ? Json(to_string(*conv.passing)) : Json(nullptr)},
                     {"note", conv.note}});
    out.passed = out.passed && passed;
  }
  const ReferenceCase dn = reference_cases()[2];
  const DnFrequencyReport dr = resolve_dn_frequency(dn.trans, dn.A);
  Json variants = Json::array();
  for (const auto& v : dr.variants)
    variants.push_back({{"variant", to_string(v.variant)},
                        {"Omega", v.Omega},
                        {"param", v.param},
                        {"max_residual", v.max_residual},
                        {"passed", v.passed},
                        {"note", v.note}});
  out.passed = out.passed && dr.passing_count == 1;
  out.detail = {{"tolerance", 1e-8},
                {"cases", cases},
                {"dn_frequency",
                 {{"variants", variants},
                  {"printed_k2", dr.printed_k2},
                  {"ode_param", dr.ode_param},
                  {"passing_count", dr.passing_count},
                  {"passing", dr.passing ? Json(to_string(*dr.passing)) : Json(nullptr)}}}};
  return out;
}

SuiteResult qes_suite(std::uint64_t seed) {
  SuiteResult out{"qes", true, Json::object()};
  // n = 0 gives E = 0 exactly.
  const Spectrum s0 = spectrum(build_recursion_matrix({1.0, 0.5, 0, 0}));
  const bool zero_ok = s0.energies.size() == 1 && s0.energies[0] == 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.1, 2.0), ub(-2.0, 2.0);
  double worst_n1 = 0.0, worst_res = 0.0;
  for (int k = 0; k < 20; ++k) {
    SexticQesParams p{ua(rng), ub(rng), 1, k % 2};
    const QesProblem prob = build_recursion_matrix(p);
    const Spectrum sp = spectrum(prob);
    const double root = std::sqrt(p.btilde * p.btilde + 2.0 * (1.0 + 2.0 * p.p) * p.atilde);
    const double lo = -2.0 * p.btilde - 2.0 * root, hi = -2.0 * p.btilde + 2.0 * root;
    worst_n1 = std::max({worst_n1, std::abs(sp.energies[0] - lo), std::abs(sp.energies[1] - hi)});
    for (std::size_t i = 0; i < sp.energies.size(); ++i)
      worst_res = std::max(worst_res, schrodinger_residual(prob, sp.energies[i], sp.coefficients[i]).max_residual);
  }
  const QesProblem pos = build_recursion_matrix({1.0, 0.0, 0, 0});
  const QesProblem neg = build_recursion_matrix({-1.0, 0.0, 0, 0});
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const NormVerdict nv_pos = norm_check(pos, 0.0, one), nv_neg = norm_check(neg, 0.0, one);
  const bool n1_ok = worst_n1 < 1e-10, res_ok = worst_res < 1e-8, norms_ok = nv_pos.finite && !nv_neg.finite;
  out.passed = zero_ok && n1_ok && res_ok && norms_ok;
  out.detail = {{"n0_energy", s0.energies.empty() ? Json(nullptr) : Json(s0.energies[0])},
                {"n0_passed", zero_ok},
                {"n1_max_deviation", worst_n1},
                {"n1_passed", n1_ok},
                {"max_schrodinger_residual", worst_res},
                {"residual_passed", res_ok},
                {"norm_atilde_positive", {{"finite", nv_pos.finite}, {"value", json_number(nv_pos.value)}}},
                {"norm_atilde_negative", {{"finite", nv_neg.finite}, {"reason", nv_neg.reason}}},
                {"norms_passed", norms_ok}};
  return out;
}

CommandResult run_simulate(const RunConfig& config) {
  const SystemSpec spec = build_model(config.model, config.model_params);
  const PhaseState init = build_initial_state(config, spec);
  Trajectory traj = integrate(spec, init, config.integrator, config.t_end);
  attach_invariants(spec, traj);

  if (!config.csv_path.empty()) {
    CsvWriter csv(config.csv_path);
    std::vector<std::string> head{"t"};
    const auto qn = coordinate_names(traj.chart, spec.pairs);
    head.insert(head.end(), qn.begin(), qn.end());
    for (const auto& n : qn) head.push_back("d" + n);
    head.insert(head.end(), traj.log.names.begin(), traj.log.names.end());
    csv.header(head);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const PhaseState& s = traj.states[i];
      std::vector<double> row{s.t};
      row.insert(row.end(), s.q.begin(), s.q.end());
      row.insert(row.end(), s.v.begin(), s.v.end());
      row.insert(row.end(), traj.log.rows[i].begin(), traj.log.rows[i].end());
      csv.row(row);
    }
  }

  Json drifts = Json::array();
  double max_drift = 0.0;
  for (const DriftEntry& d : drift_summary(traj.log)) {
    drifts.push_back({{"name", d.name}, {"initial", json_number(d.initial)}, {"max_drift", json_number(d.max_drift)}});
    max_drift = std::max(max_drift, d.max_drift);
  }

  // Growth of each x-chart coordinate: max over the second half of the run
  // against the max over the first half.
  Json growth = Json::object();
  Json unbounded = Json::array();
  if (traj.states.size() >= 4) {
    const double mid = 0.5 * (traj.states.front().t + traj.states.back().t);
    const auto names = coordinate_names(Chart::x, spec.pairs);
    std::vector<double> first(names.size(), 0.0), second(names.size(), 0.0);
    for (const PhaseState& s : traj.states) {
      const PhaseState x = to_chart(s, Chart::x);
      for (std::size_t k = 0; k < names.size(); ++k) {
        double& slot = s.t > mid ? second[k] : first[k];
        slot = std::max(slot, std::abs(x.q[k]));
      }
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
      const double ratio = first[k] > 0.0 ? second[k] / first[k] : (second[k] > 0.0 ? INFINITY : 1.0);
      growth[names[k]] = json_number(ratio);
      if (!(second[k] <= 1.05 * first[k] + 1e-12)) unbounded.push_back(names[k]);
    }
  }

  CommandResult r;
  r.report = {{"command", "simulate"},
              {"model", spec.name},
              {"chart", to_string(traj.chart)},
              {"status", to_string(traj.status)},
              {"message", traj.message},
              {"t_end", config.t_end},
              {"stop_time", traj.stop_time},
              {"blow_up_time", traj.status == TrajectoryStatus::blow_up ? Json(traj.stop_time) : Json(nullptr)},
              {"samples", traj.states.size()},
              {"integrator",
               {{"method", to_string(config.integrator.method)},
                {"rtol", config.integrator.rtol},
                {"atol", config.integrator.atol},
                {"stats", stats_json(traj.stats)}}},
              {"drifts", drifts},
              {"max_drift", json_number(max_drift)},
              {"growth_ratio", growth},
              {"unbounded", unbounded}};
  r.exit_code = traj.ok() ? exit_ok : exit_trajectory_aborted;
  return r;
}

SuiteResult closed_form_case_report(const RunConfig& config, SolutionCase kind) {
  ReferenceCase rc;
  for (const auto& r : reference_cases())
    if (r.kind == kind) rc = r;
  const bool own = !config.model_params.empty() &&
                   (is_translational(kind) ? config.model == "quartic_translational" : is_rotational_model(config.model));
  if (own) {
    if (is_translational(kind))
      rc.trans = parse_quartic_params(config.model_params);
    else
      rc.rot = parse_rotational_params(config.model_params, profile_of(config.model));
  }
  if (config.amplitude > 0.0) rc.A = config.amplitude;

  SuiteResult out{"closed_form_case", false, Json::object()};
  Json params = Json::object();
  if (is_translational(kind)) {
    params = {{"omega0_sq", rc.trans.omega0_sq}, {"alpha0", rc.trans.alpha0}, {"beta0", rc.trans.beta0},
              {"a", rc.trans.a},                 {"b", rc.trans.b},           {"gamma", rc.trans.gamma},
              {"Pi", rc.trans.Pi},               {"omega_sq", rc.trans.omega_sq()}, {"beta", rc.trans.beta()}};
  } else {
    params = {{"profile", to_string(rc.rot.profile)}, {"c", rc.rot.c},         {"omega0_sq", rc.rot.omega0_sq},
              {"alpha0", rc.rot.alpha0},              {"gamma", rc.rot.gamma}, {"alpha", rc.rot.alpha()}};
  }
  const EllipticSolutionParams sol = make_solution(rc);
  const ResidualReport res = residual_check(sol, reference_system(rc), period_grid(sol, 10.0, 1000));
  const StabilityVerdict st = stability_gate(sol);
  Json detail{{"case", to_string(kind)},
              {"params", params},
              {"A", rc.A},
              {"Omega", sol.Omega},
              {"param", sol.param},
              {"period", sol.period()},
              {"residual", res.max_residual},
              {"display_deviation", res.max_display_deviation},
              {"samples", res.samples},
              {"stability",
               {{"bounded", st.bounded},
                {"growth_ratio", json_number(st.growth_ratio)},
                {"verdict", st.verdict},
                {"claims", st.recorded_claims}}}};
  if (kind == SolutionCase::trans_dn) {
    const DnFrequencyReport dr = resolve_dn_frequency(rc.trans, rc.A);
    detail["dn_frequency_passing"] = dr.passing ? Json(to_string(*dr.passing)) : Json(nullptr);
    detail["dn_frequency_passing_count"] = dr.passing_count;
  } else if (kind != SolutionCase::rot_I) {
    const ConventionReport conv = resolve_convention(kind, is_translational(kind) ? &rc.trans : nullptr,
                                                     is_translational(kind) ? nullptr : &rc.rot, rc.A);
    detail["convention"] = {{"residual_modulus_reading", conv.residual_modulus},
                            {"residual_parameter_reading", conv.residual_parameter},
                            {"passing", conv.passing ? Json(to_string(*conv.passing)) : Json(nullptr)}};
  }
  out.passed = res.max_residual < 1e-8;
  out.detail = detail;
  return out;
}

CommandResult run_verify(const RunConfig& config) {
  if (!config.verify_case.empty()) {
    const SuiteResult s = closed_form_case_report(config, solution_case_from_string(config.verify_case));
    CommandResult r;
    r.report = {{"command", "verify"}, {"passed", s.passed}, {"report", s.detail}};
    r.exit_code = s.passed ? exit_ok : exit_suite_failed;
    return r;
  }
  std::vector<SuiteResult> suites{structural_suite(config.seed, config.inject_fault == "structural"),
                                  involution_suite_all(config.seed), gauge_suite(), closed_form_suite(),
                                  qes_suite(config.seed)};
  CommandResult r;
  bool all = true;
  Json list = Json::array();
  for (const auto& s : suites) {
    all = all && s.passed;
    list.push_back({{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
  }
  r.report = {{"command", "verify"}, {"seed", config.seed}, {"passed", all}, {"suites", list}};
  r.exit_code = all ? exit_ok : exit_suite_failed;
  return r;
}

namespace {

struct ScanAxis {
  std::string name;
  std::vector<double> values;
};

struct ScanRow {
  std::vector<double> coords;
  double omega_sq = NAN;
  double beta = NAN;
  bool in_window = false;
  std::string gate;
  std::optional<bool> bounded;
  double growth_ratio = NAN;
  std::string verdict;
};

void set_scan_param(Json& params, double& A, const std::string& name, double value) {
  if (name == "A")
    A = value;
  else
    params[name] = value;
}

}  // namespace

CommandResult run_scan(const RunConfig& config) {
  const Json& sc = config.scan;
  reject_unknown(sc, {"case", "A", "base", "axes"}, "scan");
  const SolutionCase kind = solution_case_from_string(text(sc, "case", "trans-cn"));
  const bool trans = is_translational(kind);
  if (trans && config.model != "quartic_translational")
    throw SpecError("scan: case " + to_string(kind) + " needs the quartic_translational model");
  if (!trans && !is_rotational_model(config.model))
    throw SpecError("scan: case " + to_string(kind) + " needs a rotational model");
  const Json base = sc.contains("base") ? sc.at("base") : config.model_params;
  const double A0 = num(sc, "A", 1.0);

  std::vector<ScanAxis> axes;
  if (!sc.contains("axes") || !sc.at("axes").is_array() || sc.at("axes").empty())
    throw SpecError("scan: empty grid (no axes)");
  for (const Json& a : sc.at("axes")) {
    reject_unknown(a, {"name", "min", "max", "steps"}, "scan.axes");
    ScanAxis ax{text(a, "name", ""), {}};
    const int steps = integer(a, "steps", 0);
    if (steps < 1) throw SpecError("scan: empty grid (axis '" + ax.name + "' has no steps)");
    const double lo = num(a, "min", 0.0), hi = num(a, "max", lo);
    for (int k = 0; k < steps; ++k) ax.values.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
    axes.push_back(std::move(ax));
  }
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.values.size();

  std::vector<ScanRow> rows(total);
  auto evaluate = [&](std::size_t index) {
    ScanRow row;
    Json params = base.is_null() ? Json::object() : base;
    double A = A0;
    std::size_t rest = index;
    row.coords.resize(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      const std::size_t i = rest % axes[k].values.size();
      rest /= axes[k].values.size();
      row.coords[k] = axes[k].values[i];
      set_scan_param(params, A, axes[k].name, row.coords[k]);
    }
    try {
      StabilityVerdict v;
      if (trans) {
        const QuarticTranslationalParams p = parse_quartic_params(params);
        row.omega_sq = p.omega_sq();
        row.beta = p.beta();
        if (p.Pi == 0.0) {
          v = stability_gate(make_trans_solution(kind, p, A));
        } else {
          v = stability_gate_translational(kind, p, A);
        }
      } else {
        const RotationalParams p = parse_rotational_params(params, profile_of(config.model));
        row.omega_sq = p.omega_sq();
        row.beta = p.alpha();
        v = stability_gate(make_rot_solution(kind, p, A));
      }
      row.in_window = true;
      row.bounded = v.bounded;
      row.growth_ratio = v.growth_ratio;
      row.verdict = v.verdict;
    } catch (const RangeError& e) {
      row.gate = e.gate();
      row.verdict = "outside window (" + e.gate() + ")";
    }
    rows[index] = std::move(row);
  };

  // Each grid point is independent; results are stored by index so the
  // output order never depends on scheduling.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(total, config.threads > 0 ? config.threads : hw);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < total; i = next++) evaluate(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = total;
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::string> head{"index"};
  for (const auto& ax : axes) head.push_back(ax.name);
  head.insert(head.end(), {"omega_sq", "beta", "in_window", "gate", "bounded", "growth_ratio", "verdict"});
  auto fields = [&](std::size_t i) {
    const ScanRow& r = rows[i];
    std::vector<std::string> f{std::to_string(i)};
    for (double c : r.coords) f.push_back(format_number(c));
    f.push_back(format_number(r.omega_sq));
    f.push_back(format_number(r.beta));
    f.push_back(r.in_window ? "true" : "false");
    f.push_back(r.gate);
    f.push_back(r.bounded ? (*r.bounded ? "true" : "false") : "");
    f.push_back(r.in_window ? format_number(r.growth_ratio) : "");
    f.push_back(r.verdict);
    return f;
  };
  if (!config.csv_path.empty()) {
    CsvWriter csv(config.csv_path);
    csv.header(head);
    for (std::size_t i = 0; i < total; ++i) csv.row(fields(i));
  }

  Json points = Json::array();
  std::size_t inside = 0, bounded = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const ScanRow& r = rows[i];
    Json coords = Json::object();
    for (std::size_t k = 0; k < axes.size(); ++k) coords[axes[k].name] = r.coords[k];
    inside += r.in_window;
    bounded += r.bounded.value_or(false);
    points.push_back({{"index", i},
                      {"coords", coords},
                      {"omega_sq", json_number(r.omega_sq)},
                      {"beta", json_number(r.beta)},
                      {"in_window", r.in_window},
                      {"gate", r.gate},
                      {"bounded", r.bounded ? Json(*r.bounded) : Json(nullptr)},
                      {"growth_ratio", r.in_window ? json_number(r.growth_ratio) : Json(nullptr)},
                      {"verdict", r.verdict}});
  }
  // Window transitions along the first axis, reported for one-dimensional grids.
  Json transitions = Json::array();
  if (axes.size() == 1)
    for (std::size_t i = 1; i < total; ++i)
      if (rows[i].in_window != rows[i - 1].in_window)
        transitions.push_back({{"between", {rows[i - 1].coords[0], rows[i].coords[0]}},
                               {"entering_window", rows[i].in_window}});

  CommandResult r;
  r.report = {{"command", "scan"},
              {"case", to_string(kind)},
              {"model", config.model},
              {"grid_points", total},
              {"in_window", inside},
              {"bounded", bounded},
              {"window_transitions", transitions},
              {"points", points}};
  return r;
}

CommandResult run_qes(const RunConfig& config) {
  const Json& q = config.qes;
  const SexticQesParams params = parse_qes_params(q);
  const std::string method = text(q, "method", "eigen");
  if (method != "eigen" && method != "determinant-roots") throw SpecError("qes: unknown method '" + method + "'");
  const QesProblem prob = build_recursion_matrix(params);
  const Spectrum sp =
      spectrum(prob, method == "eigen" ? SpectrumMethod::eigen : SpectrumMethod::determinant_roots);

  Json energies = Json::array(), normalizable = Json::array(), coeffs = Json::array(), norms = Json::array();
  double residual = 0.0;
  if (sp.all_real) {
    for (std::size_t i = 0; i < sp.energies.size(); ++i) {
      energies.push_back(sp.energies[i]);
      const NormVerdict nv = norm_check(prob, sp.energies[i], sp.coefficients[i]);
      normalizable.push_back(nv.finite);
      norms.push_back({{"finite", nv.finite}, {"value", json_number(nv.value)}, {"cutoff", nv.cutoff}, {"reason", nv.reason}});
      coeffs.push_back(std::vector<double>(sp.coefficients[i].data(), sp.coefficients[i].data() + sp.coefficients[i].size()));
      residual = std::max(residual, schrodinger_residual(prob, sp.energies[i], sp.coefficients[i]).max_residual);
    }
  } else {
    for (const auto& e : sp.complex_energies) energies.push_back({e.real(), e.imag()});
  }
  Json wedges = Json::array();
  for (const auto& w : stokes_wedges()) wedges.push_back({{"centre", w.centre}, {"opening", w.opening}, {"role", w.role}});
  Json matrix = Json::array();
  for (Eigen::Index i = 0; i < prob.matrix.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < prob.matrix.cols(); ++j) row.push_back(prob.matrix(i, j));
    matrix.push_back(row);
  }

  if (!config.csv_path.empty() && sp.all_real) {
    double lo = -4.0, hi = 4.0;
    int npts = 401;
    if (q.contains("grid")) {
      const Json& g = q.at("grid");
      reject_unknown(g, {"min", "max", "points"}, "qes.grid");
      lo = num(g, "min", lo);
      hi = num(g, "max", hi);
      npts = integer(g, "points", npts);
      if (npts < 2 || !(hi > lo)) throw SpecError("qes: grid needs min < max and at least two points");
    }
    CsvWriter csv(config.csv_path);
    std::vector<std::string> head{"z"};
    for (std::size_t i = 0; i < sp.energies.size(); ++i) head.push_back("phi_" + std::to_string(i));
    csv.header(head);
    for (int k = 0; k < npts; ++k) {
      const double z = lo + (hi - lo) * k / (npts - 1);
      std::vector<double> row{z};
      for (const auto& c : sp.coefficients) row.push_back(wavefunction(prob, c, z));
      csv.row(row);
    }
  }

  CommandResult r;
  r.report = {{"command", "qes"},
              {"params", {{"n", params.n}, {"p", params.p}, {"atilde", params.atilde}, {"btilde", params.btilde}}},
              {"method", to_string(sp.method)},
              {"E", energies},
              {"all_real", sp.all_real},
              {"normalizable", normalizable},
              {"norms", norms},
              {"residual", sp.all_real ? Json(residual) : Json(nullptr)},
              {"method_agreement", sp.method_agreement},
              {"charpoly_residual", sp.max_charpoly_residual},
              {"near_degenerate", sp.near_degenerate},
              {"coefficients", coeffs},
              {"matrix", matrix},
              {"stokes_wedges", wedges}};
  return r;
}

CommandResult run_command(const RunConfig& config) {
  if (config.command == "simulate") return run_simulate(config);
  if (config.command == "verify") return run_verify(config);
  if (config.command == "scan") return run_scan(config);
  if (config.command == "qes") return run_qes(config);
  throw SpecError("unknown command '" + config.command + "'");
}

}  // namespace lossgain
