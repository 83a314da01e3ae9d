#include "catch_amalgamated.hpp"

#include "lossgain/closed_forms.hpp"
#include "lossgain/dynamics.hpp"
#include "lossgain/errors.hpp"
#include "lossgain/models.hpp"
#include "lossgain/rep_algebra.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace lossgain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

QuarticTranslationalParams pure(double w0sq, double beta0, double a = 0.5, double b = 0.3, double gamma = 0.4) {
  QuarticTranslationalParams p;
  p.omega0_sq = w0sq;
  p.beta0 = beta0;
  p.a = a;
  p.b = b;
  p.gamma = gamma;
  p.alpha0 = p.alpha0_for_pure_quartic();
  return p;
}

std::string gate_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const RangeError& e) {
    return e.gate();
  }
  return "";
}

}  // namespace

TEST_CASE("cn window arithmetic") {
  QuarticTranslationalParams p = pure(2.0, 1.0, 1.0, 0.0, 1.0);
  CHECK(p.omega_sq() == 1.0);
  CHECK(p.beta() == 1.0);
  const EllipticSolutionParams s = make_trans_solution(SolutionCase::trans_cn, p, 1.0);
  CHECK_THAT(s.Omega, WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK_THAT(s.printed_k2, WithinAbs(0.25, 1e-15));
  CHECK_THAT(s.param, WithinAbs(0.25, 1e-15));  // modulus reading: library parameter k^2
  const TransPoint t0 = trans_solution(s, 0.0);
  CHECK_THAT(t0.z_minus, WithinAbs(1.0, 1e-15));
  CHECK_THAT(t0.z_minus_dot, WithinAbs(0.0, 1e-15));
  const PhaseState init = initial_state(s);
  CHECK(init.chart == Chart::z);
  CHECK_THAT(init.q[1], WithinAbs(1.0, 1e-15));
}

TEST_CASE("sn window and its amplitude edge") {
  const QuarticTranslationalParams p = pure(1.0, -1.0);
  const double edge = std::sqrt(p.omega_sq() / std::abs(p.beta()));
  const FamilyConstants at_edge = sn_constants(p.omega_sq(), p.beta(), edge);
  CHECK_THAT(at_edge.param, WithinAbs(1.0, 1e-14));
  CHECK_THAT(at_edge.Omega_sq, WithinAbs(p.omega_sq() / 2.0, 1e-14));
  CHECK(gate_of([&] { make_trans_solution(SolutionCase::trans_sn, p, edge); }) == "parameter_below_one");
  CHECK(gate_of([&] { make_trans_solution(SolutionCase::trans_sn, p, 1.01 * edge); }) == "amplitude_window");
  const EllipticSolutionParams s = make_trans_solution(SolutionCase::trans_sn, p, 0.6);
  CHECK(trans_solution(s, 0.0).z_minus == 0.0);
}

TEST_CASE("gates name the violated condition") {
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_cn, pure(-1.0, 1.0), 0.5); }) == "omega_sq_positive");
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_cn, pure(1.0, -1.0), 0.5); }) == "beta_positive");
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_sn, pure(1.0, 1.0), 0.5); }) == "beta_negative");
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_dn, pure(1.0, 1.0), 1.2); }) == "omega_sq_negative");
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_dn, pure(-1.0, 1.0), 3.0); }) == "amplitude_window");
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_cn2, pure(-1.0, 1.0), 1.0); }) == "amplitude_window");
  CHECK(gate_of([] { make_trans_solution(SolutionCase::trans_cn, pure(1.0, 1.0), -1.0); }) == "amplitude_positive");
  QuarticTranslationalParams mixed = pure(1.0, 1.0);
  mixed.alpha0 += 0.1;
  CHECK(gate_of([&] { make_trans_solution(SolutionCase::trans_cn, mixed, 0.5); }) == "alpha_zero");
  CHECK(gate_of([] {
          make_rot_solution(SolutionCase::rot_I, {RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}, 0.7);
        }) == "constant_g");
  CHECK(gate_of([] {
          make_rot_solution(SolutionCase::rot_II_cn, {RadialProfile::linear, 1.0, 1.0, 1.0, 1.0}, 0.7);
        }) == "alpha_positive");
  CHECK(gate_of([] {
          make_rot_solution(SolutionCase::rot_II_sn, {RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}, 0.7);
        }) == "alpha_negative");
  CHECK_THROWS_AS(make_rot_solution(SolutionCase::trans_cn, {}, 1.0), SpecError);
  CHECK_THROWS_AS(solution_case_from_string("trans-xx"), SpecError);
  CHECK(solution_case_from_string("rot-II-sn") == SolutionCase::rot_II_sn);
}

TEST_CASE("rotational case II(i) arithmetic") {
  const RotationalParams p{RadialProfile::linear, 1.0, 1.0, 3.0, 1.0};
  CHECK(p.alpha() == 1.0);
  const EllipticSolutionParams s = make_rot_solution(SolutionCase::rot_II_cn, p, 1.0);
  CHECK_THAT(s.Omega, WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK_THAT(s.printed_k2, WithinAbs(0.25, 1e-15));
}

TEST_CASE("rotational case I has uniform angular drift") {
  const RotationalParams p{RadialProfile::constant, 0.5, 1.0, 1.0, 0.4};
  const EllipticSolutionParams s = make_rot_solution(SolutionCase::rot_I, p, 0.7);
  for (double t : {0.0, 0.7, 3.1, 12.5}) {
    const RotPoint pt = rot_solution(s, t);
    CHECK_THAT(pt.theta, WithinAbs(p.c * p.gamma * t + s.theta0, 1e-12));
    CHECK_THAT(pt.theta_dot, WithinAbs(p.c * p.gamma, 1e-15));
  }
  RotationalParams off = p;
  off.gamma = 0.0;
  const EllipticSolutionParams s0 = make_rot_solution(SolutionCase::rot_I, off, 0.7);
  CHECK(rot_solution(s0, 9.0).theta == s0.theta0);
}

TEST_CASE("closed forms satisfy the equations of motion") {
  struct Case {
    SolutionCase kind;
    QuarticTranslationalParams trans;
    double A;
  };
  const std::vector<Case> trans{{SolutionCase::trans_cn, pure(1.0, 1.0), 0.8},
                                {SolutionCase::trans_sn, pure(1.0, -1.0), 0.6},
                                {SolutionCase::trans_dn, pure(-1.0, 1.0), 1.25},
                                {SolutionCase::trans_cn2, pure(-1.0, 1.0), 1.8}};
  for (const auto& c : trans) {
    const EllipticSolutionParams s = make_trans_solution(c.kind, c.trans, c.A);
    const ResidualReport r = residual_check(s, quartic_translational(c.trans), period_grid(s, 3.0, 600));
    INFO(to_string(c.kind));
    CHECK(r.max_residual < 1e-8);

    // Detuning the frequency by one percent is visible in every family; the
    // absolute size scales with A Omega^2, so small-amplitude families sit lower.
    EllipticSolutionParams bad = s;
    bad.Omega *= 1.01;
    CHECK(residual_check(bad, quartic_translational(c.trans), period_grid(s, 3.0, 600)).max_residual > 1e-3);
  }
  const std::vector<std::pair<SolutionCase, RotationalParams>> rot{
      {SolutionCase::rot_I, {RadialProfile::constant, 0.5, 1.0, 1.0, 0.4}},
      {SolutionCase::rot_II_cn, {RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}},
      {SolutionCase::rot_II_sn, {RadialProfile::linear, 0.5, 1.0, 0.02, 0.4}}};
  for (const auto& [kind, p] : rot) {
    const EllipticSolutionParams s = make_rot_solution(kind, p, kind == SolutionCase::rot_II_sn ? 1.0 : 0.7);
    INFO(to_string(kind));
    CHECK(residual_check(s, rotational_model(p), period_grid(s, 3.0, 600)).max_residual < 1e-8);
  }
}

TEST_CASE("cn residual on a uniform grid and its detuned control") {
  const QuarticTranslationalParams p = pure(1.0, 1.0);
  const SystemSpec spec = quartic_translational(p);
  const EllipticSolutionParams s = make_trans_solution(SolutionCase::trans_cn, p, 0.8);
  std::vector<double> grid(1000);
  for (int i = 0; i < 1000; ++i) grid[i] = 20.0 * i / 999.0;
  CHECK(residual_check(s, spec, grid).max_residual < 1e-8);
  EllipticSolutionParams bad = s;
  bad.Omega *= 1.01;
  CHECK(residual_check(bad, spec, grid).max_residual > 1e-2);
}

TEST_CASE("elliptic readings and the dn frequency") {
  const QuarticTranslationalParams p = pure(1.0, 1.0);
  const ConventionReport cr = resolve_convention(SolutionCase::trans_cn, &p, nullptr, 0.8);
  REQUIRE(cr.passing.has_value());
  CHECK(*cr.passing == EllipticReading::modulus);
  CHECK(cr.residual_modulus < 1e-8);
  CHECK(cr.residual_parameter > 1e-3);

  const DnFrequencyReport dn = resolve_dn_frequency(pure(-1.0, 1.0), 1.25);
  CHECK(dn.variants.size() == 2);
  CHECK(dn.passing_count == 1);
  REQUIRE(dn.passing.has_value());
  CHECK(*dn.passing == DnFrequency::square_root);
  // The ODE demands twice the printed k^2.
  CHECK_THAT(dn.ode_param, WithinRel(2.0 * dn.printed_k2, 1e-12));
}

TEST_CASE("printed antiderivatives agree with quadrature") {
  const QuarticTranslationalParams p = pure(1.0, 1.0);
  const EllipticSolutionParams s = make_trans_solution(SolutionCase::trans_cn, p, 0.8, EllipticReading::parameter);
  const ResidualReport r = residual_check(s, quartic_translational(p), period_grid(s, 0.45, 60));
  CHECK(r.max_display_deviation < 1e-8);

  // z+ from quadrature against an independent Simpson integration of gamma f(z-).
  const EllipticSolutionParams m = make_trans_solution(SolutionCase::trans_cn, p, 0.8);
  const auto fz = [&](double t) {
    const double zm = trans_solution(m, t).z_minus;
    return p.gamma * (p.a * zm + p.b / std::sqrt(2.0) * zm * zm);
  };
  const double T = 2.3;
  CHECK_THAT(trans_solution(m, T).z_plus - m.C1, WithinAbs(oracle::simpson(fz, 0.0, T, 2000), 1e-10));
}

TEST_CASE("rot-II-cn radius is periodic") {
  const EllipticSolutionParams s =
      make_rot_solution(SolutionCase::rot_II_cn, {RadialProfile::linear, 0.5, 1.0, 1.0, 0.4}, 0.7);
  const double T = s.period();
  for (double t : {0.0, 0.3, 1.7, 4.0})
    CHECK_THAT(rot_solution(s, t + T).r, WithinAbs(rot_solution(s, t).r, 1e-6));
}

TEST_CASE("integration reproduces the closed form") {
  const QuarticTranslationalParams p = pure(1.0, 1.0);
  const EllipticSolutionParams s = make_trans_solution(SolutionCase::trans_cn, p, 0.8);
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  cfg.sample_dt = 0.25;
  const Trajectory traj = integrate(quartic_translational(p), initial_state(s), cfg, 20.0);
  REQUIRE(traj.ok());
  double worst = 0.0;
  for (const auto& st : traj.states) {
    const PhaseState z = st.chart == Chart::z ? st : to_chart(st, Chart::z);
    const TransPoint ref = trans_solution(s, z.t);
    worst = std::max({worst, std::abs(z.q[1] - ref.z_minus), std::abs(z.q[0] - ref.z_plus)});
  }
  CHECK(worst < 1e-6);

  const RotationalParams rp{RadialProfile::linear, 0.5, 1.0, 1.0, 0.4};
  const EllipticSolutionParams rs = make_rot_solution(SolutionCase::rot_II_cn, rp, 0.7);
  const Trajectory rt = integrate(rotational_model(rp), initial_state(rs), cfg, 20.0);
  REQUIRE(rt.ok());
  worst = 0.0;
  for (const auto& st : rt.states) {
    const PhaseState z = to_chart(st, Chart::z);
    const RotPoint ref = rot_solution(rs, z.t);
    worst = std::max({worst, std::abs(z.q[0] - ref.z_plus), std::abs(z.q[1] - ref.z_minus)});
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("bounded-orbit gate") {
  // Constant gain keeps z+ bounded only when f has zero mean: b = 0, Pi = 0.
  const QuarticTranslationalParams constant_gain = pure(1.0, 1.0, 0.5, 0.0, 0.4);
  const StabilityVerdict v0 = stability_gate(make_trans_solution(SolutionCase::trans_cn, constant_gain, 0.8));
  CHECK(v0.bounded);
  const StabilityVerdict v1 = stability_gate(make_trans_solution(SolutionCase::trans_cn, pure(1.0, 1.0), 0.8));
  CHECK_FALSE(v1.bounded);
  CHECK(v1.unbounded_component == "z+");

  QuarticTranslationalParams charged = constant_gain;
  charged.Pi = 1.0;
  const StabilityVerdict v2 = stability_gate_translational(SolutionCase::trans_cn, charged, 0.8);
  CHECK_FALSE(v2.bounded);
  CHECK(v2.method == "integration");

  const StabilityVerdict r1 = stability_gate(
      make_rot_solution(SolutionCase::rot_I, {RadialProfile::constant, 0.5, 1.0, 1.0, 0.4}, 0.7));
  CHECK_FALSE(r1.bounded);
  CHECK(r1.unbounded_component == "x1");
  CHECK_FALSE(r1.recorded_claims.empty());
  const StabilityVerdict r2 = stability_gate(
      make_rot_solution(SolutionCase::rot_II_sn, {RadialProfile::linear, 0.5, 1.0, 0.02, 0.4}, 1.0));
  CHECK(r2.bounded);
}
