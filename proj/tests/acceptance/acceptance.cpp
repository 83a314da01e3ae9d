// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "lossgain/closed_forms.hpp"
#include "lossgain/commands.hpp"
#include "lossgain/dynamics.hpp"
#include "lossgain/elliptic.hpp"
#include "lossgain/invariants.hpp"
#include "lossgain/models.hpp"
#include "lossgain/qes.hpp"
#include "lossgain/rep_algebra.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace lossgain;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double x) { return fmt::format("{:.2e}", x); }

QuarticTranslationalParams quartic_reference() {
  QuarticTranslationalParams p;
  p.omega0_sq = 1.0;
  p.beta0 = 1.0;
  p.a = 0.5;
  p.b = 0.3;
  p.gamma = 0.4;
  p.alpha0 = p.alpha0_for_pure_quartic();
  return p;
}

CalogeroParams calogero_reference(int m) {
  CalogeroParams p;
  p.m = m;
  p.omega_sq = 1.0;
  p.g = 0.5;
  p.gamma = 0.4;
  p.q_coeffs = {1.0, 0.5, 0.2};
  return p;
}

// Calogero points with well separated odd coordinates.
std::vector<double> calogero_point(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<double> x(2 * m);
  for (int i = 0; i < m; ++i) {
    x[2 * i] = 1.5 * i + u(rng);
    x[2 * i + 1] = u(rng);
  }
  return x;
}

IntegratorConfig tight(double rtol, double sample_dt) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = rtol * 1e-2;
  cfg.sample_dt = sample_dt;
  return cfg;
}

Outcome structural() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<SystemSpec> specs{quartic_translational(quartic_reference()),
                                      rotational_model({RadialProfile::linear, 0.8, 1.0, 1.0, 0.5}),
                                      calogero_unidirectional(calogero_reference(2))};
  const std::vector<std::string> names{"MR_equals_D",     "D_diagonal",        "trace_D",
                                       "anticommutator_MR", "anticommutator_MD", "anticommutator_RD"};
  double worst = 0.0;
  int evaluated = 0;
  for (const auto& spec : specs)
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(spec.dof());
      if (spec.name == "calogero_unidirectional")
        x = calogero_point(spec.pairs, rng);
      else
        for (double& v : x) v = u(rng);
      const StructureReport rep = verify_structure(build_matrix_rep(spec, x), spec.gamma, 1e-12);
      for (const auto& n : names) worst = std::max(worst, rep.check(n).max_deviation);
      ++evaluated;
    }
  return {worst < 1e-12, fmt::format("{} points, max entry {}", evaluated, sci(worst))};
}

Outcome elliptic_identities() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> uu(-50.0, 50.0), um(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1'000'000; ++k) {
    const double u = uu(rng), m = um(rng);
    const elliptic::JacobiValues j = elliptic::jacobi(u, m);
    worst = std::max({worst, std::abs(j.sn * j.sn + j.cn * j.cn - 1.0), std::abs(j.dn * j.dn + m * j.sn * j.sn - 1.0)});
  }
  const double k0 = std::abs(elliptic::complete_K(0.0) - std::numbers::pi / 2);
  return {worst < 1e-12 && k0 < 1e-15, fmt::format("1e6 points, max identity error {}, |K(0) - pi/2| = {}", sci(worst), sci(k0))};
}

Outcome closed_form_residuals() {
  double worst = 0.0;
  std::string cases;
  for (const ReferenceCase& rc : reference_cases()) {
    if (rc.kind == SolutionCase::trans_dn || rc.kind == SolutionCase::rot_I) continue;
    const EllipticSolutionParams s = make_solution(rc);
    const double r = residual_check(s, reference_system(rc), period_grid(s, 10.0, 1000)).max_residual;
    worst = std::max(worst, r);
    cases += (cases.empty() ? "" : ",") + to_string(rc.kind);
  }
  const ReferenceCase dn = [] {
    for (const auto& rc : reference_cases())
      if (rc.kind == SolutionCase::trans_dn) return rc;
    return ReferenceCase{};
  }();
  const DnFrequencyReport rep = resolve_dn_frequency(dn.trans, dn.A);
  const bool ok = worst < 1e-8 && rep.passing_count == 1;
  return {ok, fmt::format("{}: max residual {}; dn variants passing {} ({})", cases, sci(worst), rep.passing_count,
                          rep.passing ? to_string(*rep.passing) : "none")};
}

Outcome integration_vs_closed_form() {
  double worst = 0.0;
  for (const ReferenceCase& rc : reference_cases()) {
    const EllipticSolutionParams s = make_solution(rc);
    const double T = 10.0 * s.period();
    const IntegratorConfig cfg = tight(1e-10, T / 500.0);
    if (is_translational(rc.kind)) {
      const Trajectory traj = integrate(reference_system(rc), initial_state(s), cfg, T);
      if (!traj.ok()) return {false, to_string(rc.kind) + ": " + traj.message};
      std::vector<double> times;
      for (const auto& st : traj.states) times.push_back(st.t);
      const auto ref = trans_solution(s, times);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const PhaseState z = to_chart(traj.states[k], Chart::z);
        worst = std::max({worst, std::abs(z.q[0] - ref[k].z_plus), std::abs(z.q[1] - ref[k].z_minus)});
      }
      continue;
    }
    // Rotational orbits split into x1 ~ r e^theta and x2 ~ r e^-theta, so they
    // are integrated in the x chart where each component gets its own error
    // scale, and compared in the oracle's own variables: r^2 = 2 x1 x2 and
    // theta = log(x1 / x2) / 2.  theta is undefined at r = 0, so it is only
    // compared where |r| >= A / 20.
    const Trajectory traj = integrate(reference_system(rc), z_to_x(initial_state(s)), cfg, T);
    if (!traj.ok()) return {false, to_string(rc.kind) + ": " + traj.message};
    std::vector<double> times;
    for (const auto& st : traj.states) times.push_back(st.t);
    const auto ref = rot_solution(s, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double x1 = traj.states[k].q[0], x2 = traj.states[k].q[1];
      const double r = std::copysign(std::sqrt(std::max(0.0, 2.0 * x1 * x2)), x1 + x2);
      worst = std::max(worst, std::abs(r - ref[k].r));
      if (std::abs(ref[k].r) >= s.A / 20.0) worst = std::max(worst, std::abs(0.5 * std::log(x1 / x2) - ref[k].theta));
    }
  }
  return {worst < 1e-6, fmt::format("{} cases over 10 periods, max deviation {}", reference_cases().size(), sci(worst))};
}

Outcome conservation() {
  struct Run {
    SystemSpec spec;
    PhaseState init;
    std::vector<std::string> watched;
  };
  const std::vector<Run> runs{
      {quartic_translational(quartic_reference()), {0.0, Chart::z, {0.1, 0.3}, {0.9, -0.1}}, {"H", "Pi_1"}},
      {rotational_model({RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}), {0.0, Chart::z, {0.8, 0.2}, {0.05, 0.1}}, {"H", "L_1"}},
      {rotational_model({RadialProfile::constant, 0.5, 1.0, 1.0, 0.05}), {0.0, Chart::z, {0.8, 0.2}, {0.05, 0.1}}, {"H", "L_1"}}};
  double worst = 0.0;
  for (const auto& run : runs) {
    Trajectory traj = integrate(run.spec, run.init, tight(1e-12, 0.5), 100.0);
    if (!traj.ok()) return {false, run.spec.name + ": " + traj.message};
    attach_invariants(run.spec, traj);
    const auto drifts = drift_summary(traj.log);
    for (const auto& w : run.watched) {
      bool found = false;
      for (const auto& d : drifts)
        if (d.name == w) {
          worst = std::max(worst, d.max_drift);
          found = true;
        }
      if (!found) return {false, run.spec.name + ": no " + w + " in the invariant log"};
    }
  }
  return {worst < 1e-8, fmt::format("t = 100, max relative drift {}", sci(worst))};
}

Outcome involution() {
  InvolutionConfig cfg;
  cfg.samples = 100;
  double worst = 0.0;
  bool ok = true;
  std::string counts;
  for (int m = 1; m <= 3; ++m) {
    const std::vector<SystemSpec> specs{translational_chain(m, quartic_reference(), 0.3),
                                        rotational_chain(m, {RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}, 0.3),
                                        rotational_chain(m, {RadialProfile::constant, 0.5, 1.0, 1.0, 0.4}, 0.3)};
    for (const auto& spec : specs) {
      const InvolutionReport r = involution_suite(spec, cfg);
      ok = ok && r.passed && r.charge_count == m + 1 && r.samples == 100;
      worst = std::max(worst, r.max_bracket);
    }
    counts += fmt::format("{}m={}: {} charges", m == 1 ? "" : ", ", m, m + 1);
  }
  return {ok && worst < 1e-10, fmt::format("{}; max bracket {}", counts, sci(worst))};
}

Outcome gauge() {
  const IntegratorConfig cfg = tight(1e-12, 0.05);
  const GaugeReport t = gauge_equivalence(quartic_translational(quartic_reference()),
                                          {0.0, Chart::z, {0.1, 0.3}, {0.9, -0.1}}, cfg, 10.0);
  const GaugeReport r = gauge_equivalence(rotational_model({RadialProfile::constant, 0.5, 1.0, 1.0, 0.4}),
                                          {0.0, Chart::z, {0.8, 0.2}, {0.05, 0.1}}, cfg, 10.0);
  const double routes = std::max({t.max_standard_vs_plus, t.max_standard_vs_minus, t.max_plus_vs_minus,
                                  r.max_standard_vs_plus, r.max_standard_vs_minus, r.max_plus_vs_minus});
  if (!t.routhian_deviation) return {false, "no reduced-dynamics comparison for the translational model"};
  const double routh = *t.routhian_deviation;
  return {routes < 1e-8 && routh < 1e-8,
          fmt::format("route deviation {}, reduced vs full z- {}", sci(routes), sci(routh))};
}

Outcome instability_witness() {
  QuarticTranslationalParams p = quartic_reference();
  p.Pi = 1.0;
  const SystemSpec spec = quartic_translational(p);
  const double zm0 = 0.8;
  const double f0 = p.a * zm0 + p.b / std::numbers::sqrt2 * zm0 * zm0;
  const PhaseState init{0.0, Chart::z, {0.0, zm0}, {p.Pi + p.gamma * f0, 0.0}};
  const Trajectory traj = integrate(spec, init, tight(1e-10, 0.01), 100.0);
  if (!traj.ok()) return {false, traj.message};
  // Least-squares slope of z+ and the time mean of f over [50, 100].
  double st = 0, sz = 0, stt = 0, stz = 0, n = 0;
  double f_sum = 0.0, f_prev = 0.0, t_prev = 0.0;
  bool first = true;
  for (const auto& s : traj.states) {
    if (s.t < 50.0 - 1e-9) continue;
    const double t = s.t, zp = s.q[0], zm = s.q[1];
    st += t;
    sz += zp;
    stt += t * t;
    stz += t * zp;
    n += 1;
    const double f = p.a * zm + p.b / std::numbers::sqrt2 * zm * zm;
    if (!first) f_sum += 0.5 * (f + f_prev) * (t - t_prev);
    first = false;
    f_prev = f;
    t_prev = t;
  }
  const double slope = (n * stz - st * sz) / (n * stt - st * st);
  const double expected = p.Pi + p.gamma * f_sum / 50.0;
  const double rel = std::abs(slope - expected) / std::abs(expected);
  return {rel < 0.01, fmt::format("slope {:.6f}, Pi + gamma <f> = {:.6f}, relative gap {}", slope, expected, sci(rel))};
}

Outcome qes_anchors() {
  SexticQesParams base;
  base.atilde = 0.8;
  base.btilde = 0.3;
  base.n = 0;
  const double e0 = spectrum(build_recursion_matrix(base)).energies.at(0);

  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> ua(0.05, 3.0), ub(-3.0, 3.0);
  double n1 = 0.0;
  for (int k = 0; k < 100; ++k) {
    SexticQesParams q;
    q.n = 1;
    q.p = k % 2;
    q.atilde = ua(rng);
    q.btilde = ub(rng);
    const Spectrum s = spectrum(build_recursion_matrix(q));
    if (s.energies.size() != 2) return {false, "n = 1 spectrum not real"};
    const double root = 2.0 * std::sqrt(q.btilde * q.btilde + 2.0 * (1 + 2 * q.p) * q.atilde);
    n1 = std::max({n1, std::abs(s.energies[0] - (-2.0 * q.btilde - root)), std::abs(s.energies[1] - (-2.0 * q.btilde + root))});
  }

  double agree = 0.0, residual = 0.0;
  bool norms = true;
  for (int n = 0; n <= 6; ++n)
    for (int p = 0; p <= 1; ++p) {
      SexticQesParams q;
      q.n = n;
      q.p = p;
      q.atilde = ua(rng);
      q.btilde = ub(rng);
      const QesProblem prob = build_recursion_matrix(q);
      const Spectrum a = spectrum(prob, SpectrumMethod::eigen);
      const Spectrum b = spectrum(prob, SpectrumMethod::determinant_roots);
      if (!a.all_real || a.energies.size() != b.energies.size()) return {false, "spectrum routes disagree in size"};
      for (std::size_t i = 0; i < a.energies.size(); ++i) {
        agree = std::max(agree, std::abs(a.energies[i] - b.energies[i]));
        residual = std::max(residual, schrodinger_residual(prob, a.energies[i], a.coefficients[i]).max_residual);
        norms = norms && norm_check(prob, a.energies[i], a.coefficients[i]).finite;
      }
    }
  // Negative quartic weight: every eigenfunction is non-normalizable.
  SexticQesParams neg;
  neg.n = 1;
  neg.atilde = -1.0;
  neg.btilde = 2.0;
  const QesProblem np = build_recursion_matrix(neg);
  const Spectrum ns = spectrum(np);
  bool divergent = !ns.energies.empty();
  for (std::size_t i = 0; i < ns.energies.size(); ++i)
    divergent = divergent && !norm_check(np, ns.energies[i], ns.coefficients[i]).finite;

  const bool ok = e0 == 0.0 && n1 < 1e-10 && agree < 1e-8 && residual < 1e-8 && norms && divergent;
  return {ok, fmt::format("n=0 E={}, n=1 max error {}, route agreement {}, grid residual {}, norms {}/{}", e0, sci(n1),
                          sci(agree), sci(residual), norms ? "finite" : "NOT finite",
                          divergent ? "divergent" : "NOT divergent")};
}

Outcome coordinate_consistency() {
  struct Run {
    SystemSpec spec;
    PhaseState x;
  };
  const std::vector<Run> runs{
      {quartic_translational(quartic_reference()), {0.0, Chart::x, {0.3, -0.2}, {0.4, 0.1}}},
      {rotational_model({RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}), {0.0, Chart::x, {0.7, 0.4}, {0.1, 0.0}}},
      {calogero_unidirectional(calogero_reference(2)), {0.0, Chart::x, {-0.8, 0.1, 0.8, -0.1}, {0.0, 0.1, 0.0, 0.0}}}};
  double worst = 0.0;
  for (const auto& run : runs) {
    const IntegratorConfig cfg = tight(1e-12, 0.1);
    const Trajectory tx = integrate(run.spec, run.x, cfg, 10.0);
    const Trajectory tz = integrate(run.spec, x_to_z(run.x), cfg, 10.0);
    if (!tx.ok() || !tz.ok() || tx.states.size() != tz.states.size()) return {false, run.spec.name + ": run failed"};
    for (std::size_t k = 0; k < tx.states.size(); ++k) {
      const PhaseState mapped = z_to_x(tz.states[k]);
      for (std::size_t i = 0; i < mapped.q.size(); ++i)
        worst = std::max({worst, std::abs(mapped.q[i] - tx.states[k].q[i]), std::abs(mapped.v[i] - tx.states[k].v[i])});
    }
  }
  return {worst < 1e-8, fmt::format("3 models, t = 10, max x-vs-z deviation {}", sci(worst))};
}

Outcome unidirectionality() {
  std::mt19937_64 rng(111);
  std::uniform_real_distribution<double> uv(-1.0, 1.0);
  double worst = 0.0;
  for (int m = 2; m <= 4; ++m) {
    const SystemSpec spec = calogero_unidirectional(calogero_reference(m));
    for (int k = 0; k < 100; ++k) {
      PhaseState s{0.0, Chart::x, calogero_point(m, rng), std::vector<double>(2 * m)};
      for (double& v : s.v) v = uv(rng);
      const std::vector<double> a = eom_x(spec, s);
      PhaseState p = s;
      for (int i = 0; i < m; ++i) p.q[2 * i + 1] += 1e-3;
      const std::vector<double> b = eom_x(spec, p);
      for (int i = 0; i < m; ++i) worst = std::max(worst, std::abs(a[2 * i] - b[2 * i]));
    }
  }
  return {worst <= 4.0 * std::numeric_limits<double>::epsilon(),
          fmt::format("m = 2..4, 100 points each, max change of odd accelerations {}", sci(worst))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"structural identities", structural},
      {"elliptic identities", elliptic_identities},
      {"closed-form residuals", closed_form_residuals},
      {"integration vs closed form", integration_vs_closed_form},
      {"conservation", conservation},
      {"involution", involution},
      {"gauge equivalence", gauge},
      {"instability witness", instability_witness},
      {"QES anchors", qes_anchors},
      {"coordinate consistency", coordinate_consistency},
      {"unidirectionality", unidirectionality}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.passed;
    fmt::print("{} {:2d} {}: {} [{:.2f}s]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail, secs);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
