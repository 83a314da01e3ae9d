#include "lossgain/rep_algebra.hpp"

#include "lossgain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lossgain {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// O = (1/sqrt 2) [[1, 1], [1, -1]]; symmetric and orthogonal, O^-1 = O.
Eigen::Matrix2d pair_map() {
  Eigen::Matrix2d o;
  o << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return o;
}

PairJet change_chart(const PairJet& jet) {
  const Eigen::Matrix2d o = pair_map();
  PairJet out;
  out.first = kInvSqrt2 * (jet.first + jet.second);
  out.second = kInvSqrt2 * (jet.first - jet.second);
  out.jacobian = o * jet.jacobian * o;
  return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

std::string to_string(Chart chart) {
  switch (chart) {
    case Chart::x:
      return "x";
    case Chart::z:
      return "z";
    case Chart::polar:
      return "polar";
  }
  return "?";
}

std::string to_string(Symmetry symmetry) {
  switch (symmetry) {
    case Symmetry::none:
      return "none";
    case Symmetry::translational:
      return "translational";
    case Symmetry::rotational:
      return "rotational";
  }
  return "?";
}

PairGainProfile PairGainProfile::in_x(Evaluator f, std::string description) {
  PairGainProfile p;
  p.chart = Chart::x;
  p.evaluate = std::move(f);
  p.description = std::move(description);
  return p;
}

PairGainProfile PairGainProfile::in_z(Evaluator f, std::string description) {
  PairGainProfile p;
  p.chart = Chart::z;
  p.evaluate = std::move(f);
  p.description = std::move(description);
  return p;
}

PairJet PairGainProfile::at_x(double x_odd, double x_even) const {
  if (chart == Chart::x) return evaluate(x_odd, x_even);
  return change_chart(evaluate(kInvSqrt2 * (x_odd + x_even), kInvSqrt2 * (x_odd - x_even)));
}

PairJet PairGainProfile::at_z(double z_plus, double z_minus) const {
  if (chart == Chart::z) return evaluate(z_plus, z_minus);
  return change_chart(evaluate(kInvSqrt2 * (z_plus + z_minus), kInvSqrt2 * (z_plus - z_minus)));
}

void SystemSpec::validate() const {
  if (pairs <= 0) throw SpecError("system '" + name + "': pair count must be positive");
  if (static_cast<int>(profiles.size()) != pairs)
    throw SpecError("system '" + name + "': expected " + std::to_string(pairs) + " gain profiles, got " +
                    std::to_string(profiles.size()));
  if (!potential.eval) throw SpecError("system '" + name + "': potential is not set");
  if (potential.chart == Chart::polar) throw SpecError("system '" + name + "': potential must be given in x or z chart");
  if (!std::isfinite(gamma)) throw SpecError("system '" + name + "': gamma must be finite");
  for (int i = 0; i < pairs; ++i) {
    const auto& p = profiles[static_cast<std::size_t>(i)];
    if (!p.evaluate) throw SpecError("system '" + name + "': profile " + std::to_string(i + 1) + " has no evaluator");
    if (p.chart == Chart::polar) throw SpecError("system '" + name + "': profiles must be given in x or z chart");
    if (symmetry == Symmetry::translational && !p.primitive)
      throw SpecError("system '" + name + "': translational profile " + std::to_string(i + 1) +
                      " needs a closed-form primitive f_i");
    if (symmetry == Symmetry::rotational && !p.radial)
      throw SpecError("system '" + name + "': rotational profile " + std::to_string(i + 1) + " needs g(r)");
  }
}

double potential_in(const SystemSpec& spec, Chart chart, std::span<const double> q, std::span<double> grad) {
  if (chart == Chart::polar) throw DomainError("potential_in: polar chart is not supported, convert to z first");
  if (q.size() != static_cast<std::size_t>(spec.dof()) || grad.size() != q.size())
    throw DomainError("potential_in: expected " + std::to_string(spec.dof()) + " coordinates");
  if (chart == spec.potential.chart) return spec.potential.eval(q, grad);
  // Same orthogonal map both ways: gradient transforms with O^T = O.
  const std::vector<double> other = pair_rotate(q);
  std::vector<double> other_grad(q.size(), 0.0);
  const double value = spec.potential.eval(other, other_grad);
  const std::vector<double> g = pair_rotate(other_grad);
  std::copy(g.begin(), g.end(), grad.begin());
  return value;
}

MatrixRep build_matrix_rep(const SystemSpec& spec, std::span<const double> x) {
  spec.validate();
  const int n = spec.dof();
  if (x.size() != static_cast<std::size_t>(n))
    throw DomainError("build_matrix_rep: point has " + std::to_string(x.size()) + " entries, expected " +
                      std::to_string(n));

  MatrixRep rep;
  rep.M = Eigen::MatrixXd::Zero(n, n);
  rep.A = Eigen::MatrixXd::Zero(n, n);
  rep.J = Eigen::MatrixXd::Zero(n, n);
  rep.Q.resize(static_cast<std::size_t>(spec.pairs));

  for (int i = 0; i < spec.pairs; ++i) {
    const int a = 2 * i;
    const int b = 2 * i + 1;
    rep.M(a, b) = 1.0;
    rep.M(b, a) = 1.0;
    // -(i gamma/2) sigma_y = (gamma/2) [[0, -1], [1, 0]]
    rep.A(a, b) = -0.5 * spec.gamma;
    rep.A(b, a) = 0.5 * spec.gamma;

    const PairJet jet = spec.profiles[static_cast<std::size_t>(i)].at_x(x[static_cast<std::size_t>(a)],
                                                                        x[static_cast<std::size_t>(b)]);
    if (!jet.jacobian.allFinite() || !std::isfinite(jet.first) || !std::isfinite(jet.second))
      throw DomainError("build_matrix_rep: gain profile " + std::to_string(i + 1) +
                        " is not differentiable at the requested point");
    rep.J.block<2, 2>(a, a) = jet.jacobian;
    rep.Q[static_cast<std::size_t>(i)] = jet.trace();
  }

  const Eigen::MatrixXd aj = rep.A * rep.J;
  rep.R = aj - aj.transpose();
  rep.D = rep.M * rep.R;
  return rep;
}

bool StructureReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const StructureCheck& c) { return c.passed; });
}

const StructureCheck& StructureReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no structure check named " + name);
}

StructureReport verify_structure(const MatrixRep& rep, double gamma, double tolerance) {
  StructureReport report;
  report.tolerance = tolerance;
  auto add = [&](std::string name, double deviation) {
    report.checks.push_back({std::move(name), deviation < tolerance, deviation});
  };

  const Eigen::MatrixXd& M = rep.M;
  const Eigen::MatrixXd& R = rep.R;
  const Eigen::MatrixXd& D = rep.D;

  add("M_symmetric", max_abs(M - M.transpose()));
  add("A_antisymmetric", max_abs(rep.A + rep.A.transpose()));
  add("R_antisymmetric", max_abs(R + R.transpose()));
  add("D_symmetric", max_abs(D - D.transpose()));
  add("MR_equals_D", max_abs(M * R - D));

  Eigen::MatrixXd off = D;
  off.diagonal().setZero();
  add("D_diagonal", max_abs(off));

  add("anticommutator_MR", max_abs(M * R + R * M));
  add("anticommutator_MD", max_abs(M * D + D * M));
  add("anticommutator_RD", max_abs(R * D + D * R));
  add("trace_D", std::abs(D.trace()));

  double balance = 0.0;
  for (std::size_t i = 0; i < rep.Q.size(); ++i) {
    const auto a = static_cast<Eigen::Index>(2 * i);
    const double expected = 0.5 * gamma * rep.Q[i];
    balance = std::max({balance, std::abs(D(a, a) - expected), std::abs(D(a + 1, a + 1) + expected)});
  }
  add("pairwise_balance", balance);
  return report;
}

std::vector<double> pair_rotate(std::span<const double> values) {
  if (values.size() % 2 != 0) throw DomainError("pair_rotate: odd number of entries");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); i += 2) {
    out[i] = kInvSqrt2 * (values[i] + values[i + 1]);
    out[i + 1] = kInvSqrt2 * (values[i] - values[i + 1]);
  }
  return out;
}

namespace {

void check_state_shape(const PhaseState& s, const char* where) {
  if (s.q.size() != s.v.size() || s.q.size() % 2 != 0)
    throw DomainError(std::string(where) + ": positions and velocities must both have 2m entries");
}

}  // namespace

PhaseState x_to_z(const PhaseState& state) {
  check_state_shape(state, "x_to_z");
  if (state.chart != Chart::x) throw DomainError("x_to_z: state is not in the x chart");
  return {state.t, Chart::z, pair_rotate(state.q), pair_rotate(state.v)};
}

PhaseState z_to_x(const PhaseState& state) {
  check_state_shape(state, "z_to_x");
  if (state.chart != Chart::z) throw DomainError("z_to_x: state is not in the z chart");
  return {state.t, Chart::x, pair_rotate(state.q), pair_rotate(state.v)};
}

PhaseState z_to_polar(const PhaseState& state) {
  check_state_shape(state, "z_to_polar");
  if (state.chart != Chart::z) throw DomainError("z_to_polar: state is not in the z chart");
  PhaseState out{state.t, Chart::polar, state.q, state.v};
  for (std::size_t i = 0; i < state.q.size(); i += 2) {
    const double zp = state.q[i], zm = state.q[i + 1];
    const double vp = state.v[i], vm = state.v[i + 1];
    if (!(zp > std::abs(zm)))
      throw SingularityError("z_to_polar: pair " + std::to_string(i / 2 + 1) +
                             " is outside the timelike region z+ > |z-|");
    const double r = std::sqrt((zp - zm) * (zp + zm));
    out.q[i] = r;
    out.q[i + 1] = std::atanh(zm / zp);
    out.v[i] = (zp * vp - zm * vm) / r;
    out.v[i + 1] = (zp * vm - zm * vp) / (r * r);
  }
  return out;
}

PhaseState polar_to_z(const PhaseState& state) {
  check_state_shape(state, "polar_to_z");
  if (state.chart != Chart::polar) throw DomainError("polar_to_z: state is not in the polar chart");
  PhaseState out{state.t, Chart::z, state.q, state.v};
  for (std::size_t i = 0; i < state.q.size(); i += 2) {
    const double r = state.q[i], th = state.q[i + 1];
    const double rd = state.v[i], thd = state.v[i + 1];
    const double ch = std::cosh(th), sh = std::sinh(th);
    out.q[i] = r * ch;
    out.q[i + 1] = r * sh;
    out.v[i] = rd * ch + r * thd * sh;
    out.v[i + 1] = rd * sh + r * thd * ch;
  }
  return out;
}

PhaseState to_chart(const PhaseState& state, Chart target) {
  if (state.chart == target) return state;
  switch (state.chart) {
    case Chart::x:
      return target == Chart::z ? x_to_z(state) : z_to_polar(x_to_z(state));
    case Chart::z:
      return target == Chart::x ? z_to_x(state) : z_to_polar(state);
    case Chart::polar:
      return target == Chart::z ? polar_to_z(state) : z_to_x(polar_to_z(state));
  }
  return state;
}

double fd_step(double x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
}

ProfileCheck check_profile(const PairGainProfile& profile, std::span<const Eigen::Vector2d> z_points,
                           double derivative_tolerance, double chart_tolerance) {
  ProfileCheck out;
  for (const auto& z : z_points) {
    // Derivatives in the z chart.
    const PairJet jet = profile.at_z(z[0], z[1]);
    for (int c = 0; c < 2; ++c) {
      const double h = fd_step(z[c]);
      Eigen::Vector2d up = z, dn = z;
      up[c] += h;
      dn[c] -= h;
      const PairJet ju = profile.at_z(up[0], up[1]);
      const PairJet jd = profile.at_z(dn[0], dn[1]);
      const double fd[2] = {(ju.first - jd.first) / (2 * h), (ju.second - jd.second) / (2 * h)};
      for (int r = 0; r < 2; ++r) {
        const double exact = jet.jacobian(r, c);
        const double err = std::abs(fd[r] - exact) / std::max(1.0, std::abs(exact));
        out.max_derivative_error = std::max(out.max_derivative_error, err);
      }
    }
    // F+ = (F_odd + F_even)/sqrt 2, F- = (F_odd - F_even)/sqrt 2.
    const double x_odd = kInvSqrt2 * (z[0] + z[1]);
    const double x_even = kInvSqrt2 * (z[0] - z[1]);
    const PairJet xj = profile.at_x(x_odd, x_even);
    out.max_chart_error = std::max({out.max_chart_error, std::abs(kInvSqrt2 * (xj.first + xj.second) - jet.first),
                                    std::abs(kInvSqrt2 * (xj.first - xj.second) - jet.second),
                                    std::abs(xj.trace() - jet.trace())});
  }
  out.passed = out.max_derivative_error < derivative_tolerance && out.max_chart_error < chart_tolerance;
  return out;
}

}  // namespace lossgain
