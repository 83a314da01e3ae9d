#include "catch_amalgamated.hpp"

#include "lossgain/dynamics.hpp"
#include "lossgain/errors.hpp"
#include "lossgain/models.hpp"
#include "lossgain/rep_algebra.hpp"

#include <cmath>
#include <random>

using namespace lossgain;
using Catch::Matchers::WithinAbs;

namespace {

QuarticTranslationalParams sample_quartic() {
  QuarticTranslationalParams p;
  p.omega0_sq = 1.3;
  p.alpha0 = 0.4;
  p.beta0 = 0.7;
  p.a = 0.6;
  p.b = -0.35;
  p.gamma = 0.8;
  p.Pi = 0.45;
  return p;
}

// Central-difference gradient check of the potential in its own chart.
double gradient_error(const SystemSpec& spec, const std::vector<double>& q) {
  std::vector<double> grad(q.size());
  spec.potential.eval(q, grad);
  double worst = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    std::vector<double> qp = q, qm = q, dummy(q.size());
    const double h = fd_step(q[k]);
    qp[k] += h;
    qm[k] -= h;
    const double fd = (spec.potential.eval(qp, dummy) - spec.potential.eval(qm, dummy)) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[k]) / std::max(1.0, std::abs(grad[k])));
  }
  return worst;
}

}  // namespace

TEST_CASE("derived quartic coefficients") {
  const QuarticTranslationalParams p = sample_quartic();
  CHECK_THAT(p.omega_sq(), WithinAbs(p.omega0_sq - p.gamma * (std::sqrt(2.0) * p.Pi * p.b + p.gamma * p.a * p.a), 1e-15));
  CHECK_THAT(p.alpha(), WithinAbs(p.alpha0 - 3.0 / std::sqrt(2.0) * p.a * p.b * p.gamma * p.gamma, 1e-15));
  CHECK_THAT(p.beta(), WithinAbs(p.beta0 - p.gamma * p.gamma * p.b * p.b, 1e-15));

  QuarticTranslationalParams pure = p;
  pure.alpha0 = pure.alpha0_for_pure_quartic();
  CHECK_THAT(pure.alpha(), WithinAbs(0.0, 1e-15));

  QuarticTranslationalParams constant_gain = p;
  constant_gain.b = 0.0;
  constant_gain.alpha0 = 0.0;
  CHECK(constant_gain.beta() == constant_gain.beta0);
  CHECK(constant_gain.alpha() == 0.0);

  QuarticTranslationalParams linear_gain = p;
  linear_gain.a = 0.0;
  linear_gain.alpha0 = 0.0;
  CHECK_THAT(linear_gain.omega_sq(), WithinAbs(p.omega0_sq - std::sqrt(2.0) * p.gamma * p.Pi * p.b, 1e-15));
}

TEST_CASE("quartic model reduces to the decoupled z- equation") {
  const QuarticTranslationalParams p = sample_quartic();
  const SystemSpec spec = quartic_translational(p);
  CHECK(spec.symmetry == Symmetry::translational);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    const double zm = u(rng), zp = u(rng), zmd = u(rng);
    const double f = p.a * zm + p.b / std::sqrt(2.0) * zm * zm;
    const auto acc = eom_z(spec, PhaseState{0.0, Chart::z, {zp, zm}, {p.Pi + p.gamma * f, zmd}});
    // z-'' + w^2 z- + alpha z-^2 + beta z-^3 = gamma a Pi
    const double reduced =
        p.gamma * p.a * p.Pi - p.omega_sq() * zm - p.alpha() * zm * zm - p.beta() * zm * zm * zm;
    CHECK_THAT(acc[1], WithinAbs(reduced, 1e-12));
    // Same thing as the derivative of g1 = (gamma^2/2) f^2 + gamma Pi f + 2 V.
    auto g1 = [&](double z) {
      const double ff = p.a * z + p.b / std::sqrt(2.0) * z * z;
      const double V = -p.omega0_sq / 4 * z * z - p.alpha0 / 6 * z * z * z - p.beta0 / 8 * z * z * z * z;
      return 0.5 * p.gamma * p.gamma * ff * ff + p.gamma * p.Pi * ff + 2 * V;
    };
    const double h = 1e-5;
    CHECK_THAT(acc[1], WithinAbs((g1(zm + h) - g1(zm - h)) / (2 * h), 1e-9));
  }
}

TEST_CASE("rotational models") {
  const RotationalParams lin{RadialProfile::linear, 0.6, 1.1, 0.9, 0.7};
  CHECK_THAT(lin.alpha(), WithinAbs(0.9 - 2 * 0.49 * 0.36, 1e-15));
  CHECK(lin.omega_sq() == 1.1);
  const RotationalParams cst{RadialProfile::constant, 0.6, 1.1, 0.9, 0.7};
  CHECK(cst.alpha() == 0.9);
  CHECK_THAT(cst.omega_sq(), WithinAbs(1.1 - 0.49 * 0.36, 1e-15));

  const SystemSpec spec = rotational_model(lin);
  CHECK(spec.symmetry == Symmetry::rotational);
  const PairJet jet = spec.profiles[0].at_z(1.0, 0.6);
  const double r = 0.8;
  CHECK_THAT(jet.first, WithinAbs(1.0 * 0.6 * r, 1e-15));
  CHECK_THAT(jet.second, WithinAbs(0.6 * 0.6 * r, 1e-15));

  // Gain off: a plain central-potential system in the pseudo-Euclidean plane.
  const SystemSpec off = rotational_model({RadialProfile::linear, 0.6, 1.1, 0.9, 0.0});
  const PhaseState z{0.0, Chart::z, {1.0, 0.6}, {0.3, -0.2}};
  std::vector<double> grad(2);
  potential_in(off, Chart::z, z.q, grad);
  const auto acc = eom_z(off, z);
  CHECK(acc[0] == -2 * grad[0]);
  CHECK(acc[1] == 2 * grad[1]);
}

TEST_CASE("catalog potentials have consistent analytic gradients") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0), lift(0.2, 1.0);
  CalogeroParams cp;
  cp.m = 3;
  cp.gamma = 0.5;
  const std::vector<SystemSpec> specs{quartic_translational(sample_quartic()),
                                      rotational_model({RadialProfile::constant, 0.6, 1.1, 0.9, 0.7}),
                                      rotational_model({RadialProfile::linear, 0.6, 1.1, 0.9, 0.7}),
                                      calogero_unidirectional(cp),
                                      sextic_qes_model({0.8, -0.4, 2, 1, 0.3, 0.2, 0.9}).system(),
                                      translational_chain(3, sample_quartic(), 0.3),
                                      rotational_chain(2, {RadialProfile::linear, 0.6, 1.1, 0.9, 0.7}, 0.2)};
  for (const auto& spec : specs) {
    for (int k = 0; k < 100; ++k) {
      std::vector<double> q;
      for (int i = 0; i < spec.pairs; ++i) {
        const double a = u(rng), b = u(rng);
        if (spec.name == "calogero_unidirectional")
          q.insert(q.end(), {a + 3.0 * i, b});
        else if (spec.symmetry == Symmetry::rotational)
          q.insert(q.end(), {std::abs(b) + lift(rng), b});
        else
          q.insert(q.end(), {a, b});
      }
      INFO(spec.name);
      CHECK(gradient_error(spec, q) < 1e-6);
    }
  }
}

TEST_CASE("dissipative Calogero model") {
  CalogeroParams cp;
  cp.m = 2;
  cp.gamma = 0.0;
  cp.omega_sq = 1.5;
  cp.g = 0.7;
  const SystemSpec spec = calogero_unidirectional(cp);
  const PhaseState s{0.0, Chart::x, {0.3, 0.8, 1.9, -0.4}, {0.1, 0.2, -0.3, 0.5}};
  const auto a = eom_x(spec, s);
  const double d = s.q[0] - s.q[2];
  // Odd sector: rational Calogero with harmonic confinement.
  CHECK_THAT(a[0], WithinAbs(-cp.omega_sq * s.q[0] + 2 * cp.g / (d * d * d), 1e-13));
  CHECK_THAT(a[2], WithinAbs(-cp.omega_sq * s.q[2] - 2 * cp.g / (d * d * d), 1e-13));
  // Bath sector with the 6 g (x_{2i} - x_{2j}) / (x_{2i-1} - x_{2j-1})^4 coupling.
  CHECK_THAT(a[1], WithinAbs(-cp.omega_sq * s.q[1] - 6 * cp.g * (s.q[1] - s.q[3]) / std::pow(d, 4), 1e-12));
  CHECK_THAT(a[3], WithinAbs(-cp.omega_sq * s.q[3] - 6 * cp.g * (s.q[3] - s.q[1]) / std::pow(d, 4), 1e-12));

  cp.gamma = 0.6;
  cp.q_coeffs = {1.0, 0.3};
  const SystemSpec damped = calogero_unidirectional(cp);
  const auto base = eom_x(damped, s);
  PhaseState moved = s;
  moved.q[1] += 1e-3;
  moved.q[3] -= 2e-3;
  moved.v[1] += 0.5;
  const auto pert = eom_x(damped, moved);
  CHECK(pert[0] == base[0]);
  CHECK(pert[2] == base[2]);

  // Bath acceleration is linear in the bath coordinates.
  for (int idx : {1, 3}) {
    PhaseState up = s, dn = s;
    up.q[static_cast<std::size_t>(idx)] += 0.1;
    dn.q[static_cast<std::size_t>(idx)] -= 0.1;
    const auto au = eom_x(damped, up), ad = eom_x(damped, dn), a0 = eom_x(damped, s);
    CHECK_THAT(au[1] - 2 * a0[1] + ad[1], WithinAbs(0.0, 1e-12));
    CHECK_THAT(au[3] - 2 * a0[3] + ad[3], WithinAbs(0.0, 1e-12));
  }

  const PhaseState collide{0.0, Chart::x, {0.5, 0.8, 0.5 + 1e-9, -0.4}, {0, 0, 0, 0}};
  CHECK_THROWS_AS(eom_x(damped, collide), SingularityError);
  cp.m = 1;
  CHECK_THROWS_AS(calogero_unidirectional(cp), SpecError);
}

TEST_CASE("sextic QES model") {
  const SexticQesParams p{0.8, -0.4, 0, 0, 0.3, 0.2, 0.9};
  const SexticQesModel m = sextic_qes_model(p);
  for (double z : {-1.3, 0.0, 0.4, 2.1}) {
    const double z2 = z * z;
    const double expected = 0.64 * z2 * z2 * z2 + 2 * 0.8 * -0.4 * z2 * z2 + (0.16 - 3 * 0.8) * z2 + 0.4;
    CHECK_THAT(m.effective_potential(z).value, WithinAbs(expected, 1e-13));
    // Separation identity: (gamma f1 / 2)^2 + V = -V'.
    const double half = p.gamma * m.f1(z) / 2;
    CHECK_THAT(half * half + m.classical_potential(z).value, WithinAbs(-m.effective_potential(z).value, 1e-12));
    CHECK_THAT(m.f1(z), WithinAbs(2 / p.gamma * (p.a * z * z2 + p.b * z), 1e-15));
  }
  const SexticQesModel harmonic = sextic_qes_model({0.0, 1.5, 3, 1});
  CHECK_THAT(harmonic.effective_potential(0.7).value, WithinAbs(2.25 * 0.49 - 1.5 * 3, 1e-14));

  const SexticQesParams free = SexticQesParams::from_raw(0.5, 0.7, 0.5, 0.7, 1, 0, 1.0);
  CHECK(free.atilde == 0.0);
  CHECK(free.btilde == 0.0);
  CHECK(sextic_qes_model(free).effective_potential(1.7).value == 0.0);

  const SexticQesParams raw = SexticQesParams::from_raw(1.0, 0.5, 0.6, 0.3, 1, 0, 1.0, -1.0);
  CHECK_THAT(raw.atilde, WithinAbs(0.8, 1e-15));
  CHECK_THAT(raw.btilde, WithinAbs(-0.4, 1e-15));
  CHECK_THROWS_AS(SexticQesParams::from_raw(0.5, 0.7, 0.6, 0.1, 1, 0, 1.0), SpecError);
  CHECK_THROWS_AS(SexticQesParams::from_raw(0.7, 0.1, 0.6, 0.2, 1, 0, 1.0), SpecError);
  CHECK_THROWS_AS((SexticQesParams{1.0, 0.0, -1, 0}.validate()), SpecError);
  CHECK_THROWS_AS((SexticQesParams{1.0, 0.0, 1, 2}.validate()), SpecError);
}

TEST_CASE("catalog names") {
  const auto names = catalog_names();
  for (const char* n : {"quartic_translational", "rotational_constant_g", "rotational_linear_g",
                        "calogero_unidirectional", "sextic_qes"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
}
