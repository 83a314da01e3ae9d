#include "lossgain/invariants.hpp"

#include "lossgain/errors.hpp"
#include "lossgain/rep_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lossgain {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

void require_canonical(const SystemSpec& spec, const CanonicalState& s, Chart chart, const char* where) {
  if (s.chart != chart)
    throw DomainError(std::string(where) + ": expected a " + to_string(chart) + "-chart canonical state");
  if (s.q.size() != idx(spec.dof()) || s.p.size() != idx(spec.dof()))
    throw DomainError(std::string(where) + ": state has the wrong dimension");
}

CanonicalState canonical_z(const SystemSpec& spec, const PhaseState& state) {
  return momenta_from_velocities(spec, to_chart(state, Chart::z));
}

double primitive_of(const PairGainProfile& profile, double arg, const char* where) {
  if (!profile.primitive) throw SpecError(std::string(where) + ": profile '" + profile.description + "' has no f_i");
  return profile.primitive(arg);
}

}  // namespace

double energy_x_form(const SystemSpec& spec, const CanonicalState& s) {
  require_canonical(spec, s, Chart::x, "energy_x_form");
  std::vector<double> grad(s.q.size());
  double h = potential_in(spec, Chart::x, s.q, grad);
  const double g = spec.gamma;
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = idx(2 * i), b = a + 1;
    const PairJet F = spec.profiles[idx(i)].at_x(s.q[a], s.q[b]);
    h += 2.0 * s.p[a] * s.p[b] + g * (F.first * s.p[a] - F.second * s.p[b]) - 0.5 * g * g * F.first * F.second;
  }
  return h;
}

double energy_z_form(const SystemSpec& spec, const CanonicalState& s) {
  require_canonical(spec, s, Chart::z, "energy_z_form");
  std::vector<double> grad(s.q.size());
  double h = potential_in(spec, Chart::z, s.q, grad);
  const double g = spec.gamma;
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = idx(2 * i), b = a + 1;
    const PairJet F = spec.profiles[idx(i)].at_z(s.q[a], s.q[b]);
    const double u = s.p[a] + 0.5 * g * F.second;
    const double w = s.p[b] - 0.5 * g * F.first;
    h += u * u - w * w;
  }
  return h;
}

double energy(const SystemSpec& spec, const PhaseState& state) {
  if (state.chart == Chart::x) return energy_x_form(spec, momenta_from_velocities(spec, state));
  return energy_z_form(spec, canonical_z(spec, state));
}

std::vector<double> translational_charges(const SystemSpec& spec, const PhaseState& state) {
  return translational_charges(spec, state, spec.cyclic);
}

std::vector<double> translational_charges(const SystemSpec& spec, const PhaseState& state,
                                          CyclicCoordinate direction) {
  if (spec.symmetry != Symmetry::translational)
    throw SpecError("translational_charges: model '" + spec.name + "' is not translationally symmetric");
  const CanonicalState s = canonical_z(spec, state);
  std::vector<double> out(idx(spec.pairs));
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = idx(2 * i), b = a + 1;
    const auto& profile = spec.profiles[idx(i)];
    const PairJet F = profile.at_z(s.q[a], s.q[b]);
    if (direction == CyclicCoordinate::z_plus)
      out[idx(i)] = 2.0 * s.p[a] + spec.gamma * (F.second - primitive_of(profile, s.q[b], "translational_charges"));
    else
      out[idx(i)] = -2.0 * s.p[b] + spec.gamma * (F.first - primitive_of(profile, s.q[a], "translational_charges"));
  }
  return out;
}

std::vector<double> rotational_charges(const SystemSpec& spec, const PhaseState& state) {
  if (spec.symmetry != Symmetry::rotational)
    throw SpecError("rotational_charges: model '" + spec.name + "' is not rotationally symmetric");
  const CanonicalState s = canonical_z(spec, state);
  std::vector<double> out(idx(spec.pairs));
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = idx(2 * i), b = a + 1;
    out[idx(i)] = 2.0 * (s.q[b] * s.p[a] + s.q[a] * s.p[b]);
  }
  return out;
}

ChargeSet evaluate_charges(const SystemSpec& spec, const PhaseState& state) {
  ChargeSet c;
  c.point = state;
  c.H = energy(spec, state);
  if (spec.symmetry == Symmetry::translational) c.Pi = translational_charges(spec, state);
  if (spec.symmetry == Symmetry::rotational) c.L = rotational_charges(spec, state);
  return c;
}

PhaseObservable hamiltonian_observable(const SystemSpec& spec) {
  PhaseObservable o;
  o.name = "H";
  o.value = [spec](const CanonicalState& s) { return energy_z_form(spec, s); };
  o.gradient = [spec](const CanonicalState& s) {
    require_canonical(spec, s, Chart::z, "hamiltonian gradient");
    PhaseGradient g;
    g.dq.assign(s.q.size(), 0.0);
    g.dp.assign(s.q.size(), 0.0);
    g.value = potential_in(spec, Chart::z, s.q, g.dq);
    const double gm = spec.gamma;
    for (int i = 0; i < spec.pairs; ++i) {
      const auto a = idx(2 * i), b = a + 1;
      const PairJet F = spec.profiles[idx(i)].at_z(s.q[a], s.q[b]);
      const double u = s.p[a] + 0.5 * gm * F.second;
      const double w = s.p[b] - 0.5 * gm * F.first;
      g.value += u * u - w * w;
      g.dq[a] += gm * (u * F.jacobian(1, 0) + w * F.jacobian(0, 0));
      g.dq[b] += gm * (u * F.jacobian(1, 1) + w * F.jacobian(0, 1));
      g.dp[a] = 2.0 * u;
      g.dp[b] = -2.0 * w;
    }
    return g;
  };
  return o;
}

PhaseObservable translational_charge_observable(const SystemSpec& spec, int pair, CyclicCoordinate direction) {
  if (pair < 0 || pair >= spec.pairs) throw DomainError("translational_charge_observable: pair index out of range");
  const auto& profile = spec.profiles[idx(pair)];
  if (!profile.primitive) throw SpecError("translational_charge_observable: profile has no f_i");
  const auto a = idx(2 * pair), b = a + 1;
  const bool plus = direction == CyclicCoordinate::z_plus;
  PhaseObservable o;
  o.name = (plus ? "Pi_" : "Pi-_") + std::to_string(pair + 1);
  const double gm = spec.gamma;
  o.gradient = [profile, a, b, plus, gm](const CanonicalState& s) {
    const PairJet F = profile.at_z(s.q[a], s.q[b]);
    const double Q = F.trace();
    PhaseGradient g;
    g.dq.assign(s.q.size(), 0.0);
    g.dp.assign(s.q.size(), 0.0);
    if (plus) {
      g.value = 2.0 * s.p[a] + gm * (F.second - profile.primitive(s.q[b]));
      g.dq[a] = gm * F.jacobian(1, 0);
      g.dq[b] = gm * (F.jacobian(1, 1) - Q);
      g.dp[a] = 2.0;
    } else {
      g.value = -2.0 * s.p[b] + gm * (F.first - profile.primitive(s.q[a]));
      g.dq[a] = gm * (F.jacobian(0, 0) - Q);
      g.dq[b] = gm * F.jacobian(0, 1);
      g.dp[b] = -2.0;
    }
    return g;
  };
  auto grad = o.gradient;
  o.value = [grad](const CanonicalState& s) { return grad(s).value; };
  return o;
}

PhaseObservable angular_momentum_observable(const SystemSpec& spec, int pair) {
  if (pair < 0 || pair >= spec.pairs) throw DomainError("angular_momentum_observable: pair index out of range");
  const auto a = idx(2 * pair), b = a + 1;
  PhaseObservable o;
  o.name = "P_theta_" + std::to_string(pair + 1);
  o.gradient = [a, b](const CanonicalState& s) {
    PhaseGradient g;
    g.dq.assign(s.q.size(), 0.0);
    g.dp.assign(s.q.size(), 0.0);
    g.value = s.q[b] * s.p[a] + s.q[a] * s.p[b];
    g.dq[a] = s.p[b];
    g.dq[b] = s.p[a];
    g.dp[a] = s.q[b];
    g.dp[b] = s.q[a];
    return g;
  };
  o.value = [a, b](const CanonicalState& s) { return s.q[b] * s.p[a] + s.q[a] * s.p[b]; };
  return o;
}

PhaseObservable coordinate_observable(int index, int dof) {
  PhaseObservable o;
  o.name = "q_" + std::to_string(index + 1);
  o.value = [index](const CanonicalState& s) { return s.q[idx(index)]; };
  o.gradient = [index, dof](const CanonicalState& s) {
    PhaseGradient g{s.q[idx(index)], std::vector<double>(idx(dof), 0.0), std::vector<double>(idx(dof), 0.0)};
    g.dq[idx(index)] = 1.0;
    return g;
  };
  return o;
}

PhaseObservable momentum_observable(int index, int dof) {
  PhaseObservable o;
  o.name = "p_" + std::to_string(index + 1);
  o.value = [index](const CanonicalState& s) { return s.p[idx(index)]; };
  o.gradient = [index, dof](const CanonicalState& s) {
    PhaseGradient g{s.p[idx(index)], std::vector<double>(idx(dof), 0.0), std::vector<double>(idx(dof), 0.0)};
    g.dp[idx(index)] = 1.0;
    return g;
  };
  return o;
}

namespace {

PhaseGradient fd_gradient(const PhaseObservable& f, const CanonicalState& point) {
  PhaseGradient g;
  g.value = f.value(point);
  g.dq.resize(point.q.size());
  g.dp.resize(point.p.size());
  CanonicalState s = point;
  for (std::size_t k = 0; k < point.q.size(); ++k) {
    const double h = fd_step(point.q[k]);
    s.q[k] = point.q[k] + h;
    const double up = f.value(s);
    s.q[k] = point.q[k] - h;
    const double dn = f.value(s);
    s.q[k] = point.q[k];
    g.dq[k] = (up - dn) / (2.0 * h);
  }
  for (std::size_t k = 0; k < point.p.size(); ++k) {
    const double h = fd_step(point.p[k]);
    s.p[k] = point.p[k] + h;
    const double up = f.value(s);
    s.p[k] = point.p[k] - h;
    const double dn = f.value(s);
    s.p[k] = point.p[k];
    g.dp[k] = (up - dn) / (2.0 * h);
  }
  return g;
}

double bracket_of(const PhaseGradient& A, const PhaseGradient& B, double* scale = nullptr) {
  double v = 0.0, sc = 0.0;
  for (std::size_t k = 0; k < A.dq.size(); ++k) {
    const double t1 = A.dq[k] * B.dp[k], t2 = A.dp[k] * B.dq[k];
    v += t1 - t2;
    sc += std::abs(t1) + std::abs(t2);
  }
  if (scale) *scale = sc;
  return v;
}

}  // namespace

BracketResult poisson_bracket(const PhaseObservable& A, const PhaseObservable& B, const CanonicalState& point,
                              double cross_check_tolerance) {
  if (point.chart != Chart::z) throw DomainError("poisson_bracket: brackets are evaluated in the canonical z chart");
  BracketResult r;
  const PhaseGradient fa = fd_gradient(A, point);
  const PhaseGradient fb = fd_gradient(B, point);
  double scale = 0.0;
  r.fd_value = bracket_of(fa, fb, &scale);
  if (A.gradient && B.gradient) {
    r.value = bracket_of(A.gradient(point), B.gradient(point));
  } else {
    r.fd_fallback = true;
    const PhaseGradient ga = A.gradient ? A.gradient(point) : fa;
    const PhaseGradient gb = B.gradient ? B.gradient(point) : fb;
    r.value = bracket_of(ga, gb);
  }
  r.fd_discrepancy = std::abs(r.value - r.fd_value);
  r.cross_check_passed = r.fd_discrepancy <= cross_check_tolerance * std::max(1.0, scale);
  return r;
}

InvolutionReport involution_suite(const SystemSpec& spec, const InvolutionConfig& config) {
  spec.validate();
  if (spec.symmetry == Symmetry::none)
    throw SpecError("involution_suite: model '" + spec.name + "' carries no symmetry tag");
  if (config.samples <= 0) throw SpecError("involution_suite: sample count must be positive");

  std::vector<PhaseObservable> obs{hamiltonian_observable(spec)};
  for (int i = 0; i < spec.pairs; ++i)
    obs.push_back(spec.symmetry == Symmetry::translational ? translational_charge_observable(spec, i, spec.cyclic)
                                                           : angular_momentum_observable(spec, i));

  InvolutionReport rep;
  rep.model = spec.name;
  rep.pairs = spec.pairs;
  rep.charge_count = static_cast<int>(obs.size());
  rep.samples = config.samples;
  for (std::size_t i = 0; i < obs.size(); ++i)
    for (std::size_t j = i + 1; j < obs.size(); ++j) rep.brackets.push_back({obs[i].name, obs[j].name, 0.0, 0.0, false});

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> box(-config.box, config.box);
  std::uniform_real_distribution<double> lift(0.2 * config.box, config.box);
  const auto n = idx(spec.dof());
  for (int s = 0; s < config.samples; ++s) {
    CanonicalState pt{0.0, Chart::z, std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < spec.pairs; ++i) {
      const auto a = idx(2 * i), b = a + 1;
      pt.q[b] = box(rng);
      pt.q[a] = spec.symmetry == Symmetry::rotational ? std::abs(pt.q[b]) + lift(rng) : box(rng);
      pt.p[a] = box(rng);
      pt.p[b] = box(rng);
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = i + 1; j < obs.size(); ++j, ++k) {
        const BracketResult r = poisson_bracket(obs[i], obs[j], pt);
        auto& sum = rep.brackets[k];
        sum.max_abs = std::max(sum.max_abs, std::abs(r.value));
        sum.max_fd_discrepancy = std::max(sum.max_fd_discrepancy, r.fd_discrepancy);
        sum.fd_fallback = sum.fd_fallback || r.fd_fallback;
      }
    }
  }
  for (const auto& b : rep.brackets) rep.max_bracket = std::max(rep.max_bracket, b.max_abs);
  rep.passed = rep.max_bracket < config.tolerance;
  if (!rep.passed)
    rep.verdict = "involution violated";
  else if (spec.pairs == 1)
    rep.verdict = "completely integrable (N=2)";
  else
    rep.verdict = "partially integrable (" + std::to_string(rep.charge_count) + " integrals in involution, N=" +
                  std::to_string(spec.dof()) + ")";
  return rep;
}

void attach_invariants(const SystemSpec& spec, Trajectory& trajectory) {
  InvariantLog log;
  log.names.push_back("H");
  for (int i = 0; i < spec.pairs; ++i) {
    if (spec.symmetry == Symmetry::translational)
      log.names.push_back((spec.cyclic == CyclicCoordinate::z_plus ? "Pi_" : "Pi-_") + std::to_string(i + 1));
    else if (spec.symmetry == Symmetry::rotational)
      log.names.push_back("L_" + std::to_string(i + 1));
  }
  log.rows.reserve(trajectory.states.size());
  for (const auto& st : trajectory.states) {
    std::vector<double> row{energy(spec, st)};
    if (spec.symmetry == Symmetry::translational) {
      const auto pi = translational_charges(spec, st);
      row.insert(row.end(), pi.begin(), pi.end());
    } else if (spec.symmetry == Symmetry::rotational) {
      const auto l = rotational_charges(spec, st);
      row.insert(row.end(), l.begin(), l.end());
    }
    log.rows.push_back(std::move(row));
  }
  trajectory.log = std::move(log);
}

std::vector<DriftEntry> drift_summary(const InvariantLog& log) {
  std::vector<DriftEntry> out;
  if (log.rows.empty()) return out;
  for (std::size_t c = 0; c < log.names.size(); ++c) {
    DriftEntry e{log.names[c], log.rows.front()[c], 0.0};
    const double denom = std::max(1.0, std::abs(e.initial));
    for (const auto& row : log.rows) e.max_drift = std::max(e.max_drift, std::abs(row[c] - e.initial) / denom);
    out.push_back(e);
  }
  return out;
}

std::string to_string(GaugeRoute route) {
  switch (route) {
    case GaugeRoute::standard:
      return "L";
    case GaugeRoute::cyclic_plus:
      return "L1";
    case GaugeRoute::cyclic_minus:
      return "L2";
  }
  return "?";
}

std::vector<double> gauge_accelerations(const SystemSpec& spec, GaugeRoute route, const PhaseState& z) {
  if (z.chart != Chart::z) throw DomainError("gauge_accelerations: z-chart state required");
  std::vector<double> gradV(z.q.size());
  potential_in(spec, Chart::z, z.q, gradV);
  std::vector<double> acc(z.q.size());
  const double gm = spec.gamma;
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = idx(2 * i), b = a + 1;
    const auto& profile = spec.profiles[idx(i)];
    // DA(k, j) = d A_k / d z_j for the vector potential of this pair.
    Eigen::Matrix2d DA = Eigen::Matrix2d::Zero();
    switch (route) {
      case GaugeRoute::standard: {
        const PairJet F = profile.at_z(z.q[a], z.q[b]);
        DA.row(0) = -0.5 * gm * F.jacobian.row(1);
        DA.row(1) = 0.5 * gm * F.jacobian.row(0);
        break;
      }
      case GaugeRoute::cyclic_plus: {
        if (!profile.gauge) throw SpecError("gauge_accelerations: profile '" + profile.description + "' has no gauge primitives");
        const Jet2 phi = profile.gauge->along_minus(z.q[a], z.q[b]);
        DA.row(0) = -0.5 * gm * phi.gradient.transpose();
        break;
      }
      case GaugeRoute::cyclic_minus: {
        if (!profile.gauge) throw SpecError("gauge_accelerations: profile '" + profile.description + "' has no gauge primitives");
        const Jet2 phi = profile.gauge->along_plus(z.q[a], z.q[b]);
        DA.row(1) = 0.5 * gm * phi.gradient.transpose();
        break;
      }
    }
    const double vel[2] = {z.v[a], z.v[b]};
    double force[2] = {0.0, 0.0};
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) force[j] += vel[k] * (DA(k, j) - DA(j, k));
    // (1/2) eta z'' = force - grad V with eta = diag(1, -1)
    acc[a] = 2.0 * (force[0] - gradV[a]);
    acc[b] = -2.0 * (force[1] - gradV[b]);
  }
  return acc;
}

namespace {

OdeSolution run_route(const SystemSpec& spec, GaugeRoute route, const PhaseState& z0, const IntegratorConfig& cfg,
                      double t_end) {
  const Eigen::Index n = spec.dof();
  const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y) {
    const std::vector<double> acc = gauge_accelerations(spec, route, unpack(t, Chart::z, y));
    Eigen::VectorXd dy(2 * n);
    dy.head(n) = y.tail(n);
    for (Eigen::Index k = 0; k < n; ++k) dy[n + k] = acc[idx(static_cast<int>(k))];
    return dy;
  };
  return integrate_ode(rhs, z0.t, pack(z0), t_end, cfg);
}

double max_deviation(const OdeSolution& A, const OdeSolution& B, Eigen::Index rows) {
  double d = 0.0;
  const std::size_t count = std::min(A.t.size(), B.t.size());
  for (std::size_t k = 0; k < count; ++k) d = std::max(d, (A.y[k].head(rows) - B.y[k].head(rows)).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

GaugeReport gauge_equivalence(const SystemSpec& spec, const PhaseState& initial, const IntegratorConfig& config,
                              double t_end, double tolerance) {
  spec.validate();
  GaugeReport rep;
  rep.model = spec.name;
  rep.t_end = t_end;
  rep.tolerance = tolerance;
  IntegratorConfig cfg = config;
  if (cfg.sample_dt <= 0.0) cfg.sample_dt = (t_end - initial.t) / 200.0;
  const PhaseState z0 = to_chart(initial, Chart::z);
  const Eigen::Index n = spec.dof();

  const auto a0 = gauge_accelerations(spec, GaugeRoute::standard, z0);
  const auto a1 = gauge_accelerations(spec, GaugeRoute::cyclic_plus, z0);
  const auto a2 = gauge_accelerations(spec, GaugeRoute::cyclic_minus, z0);
  for (std::size_t k = 0; k < a0.size(); ++k)
    rep.max_rhs_difference = std::max({rep.max_rhs_difference, std::abs(a0[k] - a1[k]), std::abs(a0[k] - a2[k])});

  const OdeSolution s0 = run_route(spec, GaugeRoute::standard, z0, cfg, t_end);
  const OdeSolution s1 = run_route(spec, GaugeRoute::cyclic_plus, z0, cfg, t_end);
  const OdeSolution s2 = run_route(spec, GaugeRoute::cyclic_minus, z0, cfg, t_end);
  if (!s0.ok() || !s1.ok() || !s2.ok()) {
    rep.message = "integration failed: " + s0.message + s1.message + s2.message;
    return rep;
  }
  rep.max_standard_vs_plus = max_deviation(s0, s1, n);
  rep.max_standard_vs_minus = max_deviation(s0, s2, n);
  rep.max_plus_vs_minus = max_deviation(s1, s2, n);
  bool ok = std::max({rep.max_standard_vs_plus, rep.max_standard_vs_minus, rep.max_plus_vs_minus}) < tolerance;

  if (spec.symmetry == Symmetry::translational && spec.cyclic == CyclicCoordinate::z_plus) {
    // One-degree dynamics per pair from the Routhian of the z+-cyclic Lagrangian:
    //   z-'' = gamma Q (Pi + gamma f) + 2 dV/dz-
    const std::vector<double> Pi = translational_charges(spec, z0);
    const int m = spec.pairs;
    const OdeRhs reduced = [&](double, const Eigen::VectorXd& y) {
      std::vector<double> q(idx(2 * m), 0.0), grad(idx(2 * m));
      for (int i = 0; i < m; ++i) q[idx(2 * i + 1)] = y[i];
      potential_in(spec, Chart::z, q, grad);
      Eigen::VectorXd dy(2 * m);
      for (int i = 0; i < m; ++i) {
        const auto& profile = spec.profiles[idx(i)];
        const double zm = y[i];
        const double Q = profile.at_z(0.0, zm).trace();
        dy[i] = y[m + i];
        dy[m + i] = spec.gamma * Q * (Pi[idx(i)] + spec.gamma * profile.primitive(zm)) + 2.0 * grad[idx(2 * i + 1)];
      }
      return dy;
    };
    Eigen::VectorXd y0(2 * m);
    for (int i = 0; i < m; ++i) {
      y0[i] = z0.q[idx(2 * i + 1)];
      y0[m + i] = z0.v[idx(2 * i + 1)];
    }
    const OdeSolution r = integrate_ode(reduced, z0.t, y0, t_end, cfg);
    if (!r.ok()) {
      rep.message = "reduced integration failed: " + r.message;
      return rep;
    }
    double dev = 0.0;
    const std::size_t count = std::min(r.t.size(), s0.t.size());
    for (std::size_t k = 0; k < count; ++k)
      for (int i = 0; i < m; ++i) dev = std::max(dev, std::abs(r.y[k][i] - s0.y[k][2 * i + 1]));
    rep.routhian_deviation = dev;
    ok = ok && dev < tolerance;
  }
  rep.passed = ok;
  if (rep.message.empty()) rep.message = ok ? "trajectories coincide" : "trajectories differ beyond tolerance";
  return rep;
}

}  // namespace lossgain
