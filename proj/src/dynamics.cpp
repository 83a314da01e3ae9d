#include "lossgain/dynamics.hpp"

#include "lossgain/errors.hpp"
#include "lossgain/rep_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lossgain {

namespace {

void require_chart(const PhaseState& state, Chart chart, const char* where) {
  if (state.chart != chart)
    throw DomainError(std::string(where) + ": expected a " + to_string(chart) + "-chart state, got " +
                      to_string(state.chart));
}

void require_shape(const SystemSpec& spec, std::size_t q, std::size_t v, const char* where) {
  const auto n = static_cast<std::size_t>(spec.dof());
  if (q != n || v != n)
    throw DomainError(std::string(where) + ": state must have " + std::to_string(n) + " coordinates and " +
                      std::to_string(n) + " velocities");
}

}  // namespace

std::vector<double> eom_x(const SystemSpec& spec, const PhaseState& state) {
  require_chart(state, Chart::x, "eom_x");
  require_shape(spec, state.q.size(), state.v.size(), "eom_x");
  std::vector<double> grad(state.q.size());
  potential_in(spec, Chart::x, state.q, grad);
  std::vector<double> acc(state.q.size());
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = static_cast<std::size_t>(2 * i), b = a + 1;
    const double Q = spec.profiles[static_cast<std::size_t>(i)].at_x(state.q[a], state.q[b]).trace();
    acc[a] = spec.gamma * Q * state.v[a] - 2.0 * grad[b];
    acc[b] = -spec.gamma * Q * state.v[b] - 2.0 * grad[a];
  }
  return acc;
}

std::vector<double> eom_z(const SystemSpec& spec, const PhaseState& state) {
  require_chart(state, Chart::z, "eom_z");
  require_shape(spec, state.q.size(), state.v.size(), "eom_z");
  std::vector<double> grad(state.q.size());
  potential_in(spec, Chart::z, state.q, grad);
  std::vector<double> acc(state.q.size());
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = static_cast<std::size_t>(2 * i), b = a + 1;
    const double Q = spec.profiles[static_cast<std::size_t>(i)].at_z(state.q[a], state.q[b]).trace();
    acc[a] = spec.gamma * Q * state.v[b] - 2.0 * grad[a];
    acc[b] = spec.gamma * Q * state.v[a] + 2.0 * grad[b];
  }
  return acc;
}

std::vector<double> eom_polar(const SystemSpec& spec, const PhaseState& state) {
  require_chart(state, Chart::polar, "eom_polar");
  require_shape(spec, state.q.size(), state.v.size(), "eom_polar");
  if (spec.symmetry != Symmetry::rotational)
    throw DomainError("eom_polar: the pseudo-polar equations need a rotationally symmetric model");

  std::vector<double> z(state.q.size());
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = static_cast<std::size_t>(2 * i), b = a + 1;
    const double r = state.q[a];
    if (!(r > 0.0))
      throw SingularityError("eom_polar: r_" + std::to_string(i + 1) + " = " + std::to_string(r) +
                             " left the timelike region; integrate in the z chart instead");
    z[a] = r * std::cosh(state.q[b]);
    z[b] = r * std::sinh(state.q[b]);
  }
  std::vector<double> grad(z.size());
  potential_in(spec, Chart::z, z, grad);

  std::vector<double> acc(state.q.size());
  const double gamma = spec.gamma;
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = static_cast<std::size_t>(2 * i), b = a + 1;
    const double r = state.q[a], th = state.q[b];
    const double rd = state.v[a], thd = state.v[b];
    const Jet1 g = spec.profiles[static_cast<std::size_t>(i)].radial(r);
    const double r2 = r * r;
    const double p_theta = -0.5 * (r2 * thd - gamma * r2 * g.value);
    const double dV_dr = grad[a] * std::cosh(th) + grad[b] * std::sinh(th);
    acc[a] = -4.0 * p_theta * p_theta / (r2 * r) + gamma * gamma * r * g.value * g.value -
             gamma * (2.0 * p_theta - gamma * r2 * g.value) * g.derivative - 2.0 * dV_dr;
    acc[b] = gamma * g.derivative * rd + 4.0 * p_theta * rd / (r2 * r);
  }
  return acc;
}

std::vector<double> accelerations(const SystemSpec& spec, const PhaseState& state) {
  switch (state.chart) {
    case Chart::x:
      return eom_x(spec, state);
    case Chart::z:
      return eom_z(spec, state);
    case Chart::polar:
      return eom_polar(spec, state);
  }
  return {};
}

CanonicalState momenta_from_velocities(const SystemSpec& spec, const PhaseState& state) {
  require_shape(spec, state.q.size(), state.v.size(), "momenta_from_velocities");
  CanonicalState out{state.t, state.chart, state.q, std::vector<double>(state.q.size())};
  const double gamma = spec.gamma;
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = static_cast<std::size_t>(2 * i), b = a + 1;
    const auto& profile = spec.profiles[static_cast<std::size_t>(i)];
    switch (state.chart) {
      case Chart::x: {
        const PairJet F = profile.at_x(state.q[a], state.q[b]);
        out.p[a] = 0.5 * (state.v[b] + gamma * F.second);
        out.p[b] = 0.5 * (state.v[a] - gamma * F.first);
        break;
      }
      case Chart::z: {
        const PairJet F = profile.at_z(state.q[a], state.q[b]);
        out.p[a] = 0.5 * (state.v[a] - gamma * F.second);
        out.p[b] = -0.5 * (state.v[b] - gamma * F.first);
        break;
      }
      case Chart::polar: {
        if (!profile.radial) throw DomainError("momenta_from_velocities: polar chart needs a rotational profile");
        const double r = state.q[a];
        const double g = profile.radial(r).value;
        out.p[a] = 0.5 * state.v[a];
        out.p[b] = -0.5 * (r * r * state.v[b] - gamma * r * r * g);
        break;
      }
    }
  }
  return out;
}

PhaseState velocities_from_momenta(const SystemSpec& spec, const CanonicalState& state) {
  require_shape(spec, state.q.size(), state.p.size(), "velocities_from_momenta");
  PhaseState out{state.t, state.chart, state.q, std::vector<double>(state.q.size())};
  const double gamma = spec.gamma;
  for (int i = 0; i < spec.pairs; ++i) {
    const auto a = static_cast<std::size_t>(2 * i), b = a + 1;
    const auto& profile = spec.profiles[static_cast<std::size_t>(i)];
    switch (state.chart) {
      case Chart::x: {
        const PairJet F = profile.at_x(state.q[a], state.q[b]);
        out.v[a] = 2.0 * state.p[b] + gamma * F.first;
        out.v[b] = 2.0 * state.p[a] - gamma * F.second;
        break;
      }
      case Chart::z: {
        const PairJet F = profile.at_z(state.q[a], state.q[b]);
        out.v[a] = 2.0 * state.p[a] + gamma * F.second;
        out.v[b] = -2.0 * state.p[b] + gamma * F.first;
        break;
      }
      case Chart::polar: {
        if (!profile.radial) throw DomainError("velocities_from_momenta: polar chart needs a rotational profile");
        const double r = state.q[a];
        const double g = profile.radial(r).value;
        out.v[a] = 2.0 * state.p[a];
        out.v[b] = gamma * g - 2.0 * state.p[b] / (r * r);
        break;
      }
    }
  }
  return out;
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw SpecError("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw SpecError("integrator max_step must be positive");
  if (method == Method::rk4 && !(fixed_step > 0.0)) throw SpecError("rk4 needs a positive fixed_step");
  if (max_steps <= 0) throw SpecError("integrator max_steps must be positive");
}

std::string to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::completed:
      return "completed";
    case TrajectoryStatus::blow_up:
      return "blow_up";
    case TrajectoryStatus::step_underflow:
      return "step_underflow";
    case TrajectoryStatus::non_finite:
      return "non_finite";
    case TrajectoryStatus::chart_singularity:
      return "chart_singularity";
    case TrajectoryStatus::step_limit:
      return "step_limit";
  }
  return "?";
}

std::string to_string(Method method) { return method == Method::rk4 ? "rk4" : "dopri54"; }

Eigen::VectorXd OdeSolution::at(double time) const {
  if (t.empty()) throw DomainError("OdeSolution::at: empty solution");
  if (time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const auto k = static_cast<std::size_t>(it - t.begin());
  const double t0 = t[k - 1], h = t[k] - t0;
  const double s = (time - t0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y[k - 1] + h10 * h * dy[k - 1] + h01 * y[k] + h11 * h * dy[k];
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1, double atol,
                  double rtol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    sum += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(1, err.size())));
}

class Driver {
 public:
  Driver(const OdeRhs& rhs, double t0, double t_end, const IntegratorConfig& cfg)
      : rhs_(rhs), t0_(t0), t_end_(t_end), cfg_(cfg) {}

  OdeSolution run(const Eigen::VectorXd& y0) {
    sol_.stop_time = t0_;
    try {
      Eigen::VectorXd f0 = eval(t0_, y0);
      record(t0_, y0, f0);
      if (!finite_and_bounded(y0, t0_)) return std::move(sol_);
      if (cfg_.method == Method::dopri54)
        run_dopri(y0, f0);
      else
        run_rk4(y0, f0);
    } catch (const SingularityError& e) {
      sol_.status = TrajectoryStatus::chart_singularity;
      sol_.message = e.what();
    }
    return std::move(sol_);
  }

 private:
  Eigen::VectorXd eval(double t, const Eigen::VectorXd& y) {
    ++sol_.stats.rhs_evaluations;
    return rhs_(t, y);
  }

  void record(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
    sol_.t.push_back(t);
    sol_.y.push_back(y);
    sol_.dy.push_back(f);
    sol_.stop_time = t;
  }

  bool finite_and_bounded(const Eigen::VectorXd& y, double t) {
    if (!y.allFinite()) {
      sol_.status = TrajectoryStatus::non_finite;
      sol_.message = "non-finite state at t = " + std::to_string(t);
      return false;
    }
    if (y.size() > 0 && y.cwiseAbs().maxCoeff() > cfg_.blow_up_threshold) {
      sol_.status = TrajectoryStatus::blow_up;
      sol_.message = "state exceeded " + std::to_string(cfg_.blow_up_threshold) + " at t = " + std::to_string(t);
      return false;
    }
    return true;
  }

  // Next time at which a sample must be recorded.
  double next_target(long k) const {
    if (cfg_.sample_dt <= 0.0) return t_end_;
    return std::min(t_end_, t0_ + static_cast<double>(k) * cfg_.sample_dt);
  }

  void run_dopri(Eigen::VectorXd y, Eigen::VectorXd k1) {
    double t = t0_;
    double h = cfg_.initial_step > 0.0 ? cfg_.initial_step : initial_step(y, k1);
    long sample_index = 1;
    double target = next_target(sample_index);
    bool last_rejected = false;
    const double span = t_end_ - t0_;

    while (t < t_end_) {
      if (sol_.stats.steps + sol_.stats.rejections >= cfg_.max_steps) {
        sol_.status = TrajectoryStatus::step_limit;
        sol_.message = "step limit reached at t = " + std::to_string(t);
        return;
      }
      h = std::min(h, cfg_.max_step);
      const double proposed = h;
      bool landing = false;
      if (t + 1.01 * h >= target) {
        h = target - t;
        landing = true;
      }
      if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(t), std::abs(span)})) {
        sol_.status = TrajectoryStatus::step_underflow;
        sol_.message = "step size underflow at t = " + std::to_string(t) + " (possible blow-up)";
        return;
      }

      const Eigen::VectorXd k2 = eval(t + c2 * h, y + h * (a21 * k1));
      const Eigen::VectorXd k3 = eval(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Eigen::VectorXd k4 = eval(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::VectorXd k5 = eval(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::VectorXd k6 = eval(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Eigen::VectorXd y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const double t1 = landing ? target : t + h;
      const Eigen::VectorXd k7 = eval(t1, y1);
      const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double en = error_norm(err, y, y1, cfg_.atol, cfg_.rtol);
      if (!std::isfinite(en)) en = 1e10;

      if (en <= 1.0) {
        ++sol_.stats.steps;
        t = t1;
        y = y1;
        k1 = k7;
        if (!finite_and_bounded(y, t)) {
          record(t, y, k1);
          return;
        }
        if (landing || cfg_.sample_dt <= 0.0) {
          record(t, y, k1);
          if (landing) target = next_target(++sample_index);
        }
        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 10.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        // A step clipped to land on a sample does not shrink the next one.
        h = landing ? std::max(h * fac, proposed) : h * fac;
        last_rejected = false;
      } else {
        ++sol_.stats.rejections;
        h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        last_rejected = true;
      }
    }
  }

  void run_rk4(Eigen::VectorXd y, Eigen::VectorXd k1) {
    double t = t0_;
    long sample_index = 1;
    double target = next_target(sample_index);
    while (t < t_end_) {
      if (sol_.stats.steps >= cfg_.max_steps) {
        sol_.status = TrajectoryStatus::step_limit;
        sol_.message = "step limit reached at t = " + std::to_string(t);
        return;
      }
      double h = cfg_.fixed_step;
      bool landing = false;
      if (t + h * (1.0 + 1e-9) >= target) {
        h = target - t;
        landing = true;
      }
      const Eigen::VectorXd k2 = eval(t + 0.5 * h, y + 0.5 * h * k1);
      const Eigen::VectorXd k3 = eval(t + 0.5 * h, y + 0.5 * h * k2);
      const Eigen::VectorXd k4 = eval(t + h, y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = landing ? target : t + h;
      k1 = eval(t, y);
      ++sol_.stats.steps;
      if (!finite_and_bounded(y, t)) {
        record(t, y, k1);
        return;
      }
      if (landing || cfg_.sample_dt <= 0.0) {
        record(t, y, k1);
        if (landing) target = next_target(++sample_index);
      }
    }
  }

  double initial_step(const Eigen::VectorXd& y0, const Eigen::VectorXd& f0) {
    Eigen::VectorXd sc(y0.size());
    for (Eigen::Index i = 0; i < y0.size(); ++i) sc[i] = cfg_.atol + cfg_.rtol * std::abs(y0[i]);
    const double n = static_cast<double>(std::max<Eigen::Index>(1, y0.size()));
    const double d0 = std::sqrt(y0.cwiseQuotient(sc).squaredNorm() / n);
    const double d1 = std::sqrt(f0.cwiseQuotient(sc).squaredNorm() / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end_ - t0_);
    const Eigen::VectorXd f1 = eval(t0_ + h0, y0 + h0 * f0);
    const double d2 = std::sqrt((f1 - f0).cwiseQuotient(sc).squaredNorm() / n) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min(100.0 * h0, h1);
  }

  const OdeRhs& rhs_;
  double t0_;
  double t_end_;
  const IntegratorConfig& cfg_;
  OdeSolution sol_;
};

}  // namespace

OdeSolution integrate_ode(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t_end,
                          const IntegratorConfig& config) {
  config.validate();
  if (!(t_end > t0)) throw DomainError("integrate: t_end must exceed the initial time");
  Driver driver(rhs, t0, t_end, config);
  return driver.run(y0);
}

Eigen::VectorXd pack(const PhaseState& state) {
  const auto n = static_cast<Eigen::Index>(state.q.size());
  Eigen::VectorXd y(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = state.q[static_cast<std::size_t>(i)];
    y[n + i] = state.v[static_cast<std::size_t>(i)];
  }
  return y;
}

PhaseState unpack(double t, Chart chart, const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size() / 2;
  PhaseState s{t, chart, std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
  for (Eigen::Index i = 0; i < n; ++i) {
    s.q[static_cast<std::size_t>(i)] = y[i];
    s.v[static_cast<std::size_t>(i)] = y[n + i];
  }
  return s;
}

Trajectory integrate(const SystemSpec& spec, const PhaseState& initial, const IntegratorConfig& config, double t_end) {
  spec.validate();
  require_shape(spec, initial.q.size(), initial.v.size(), "integrate");
  const Chart chart = initial.chart;
  const Eigen::Index n = spec.dof();
  const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y) {
    const PhaseState s = unpack(t, chart, y);
    const std::vector<double> acc = accelerations(spec, s);
    Eigen::VectorXd dy(2 * n);
    dy.head(n) = y.tail(n);
    for (Eigen::Index i = 0; i < n; ++i) dy[n + i] = acc[static_cast<std::size_t>(i)];
    return dy;
  };
  const OdeSolution sol = integrate_ode(rhs, initial.t, pack(initial), t_end, config);

  Trajectory traj;
  traj.chart = chart;
  traj.stats = sol.stats;
  traj.status = sol.status;
  traj.message = sol.message;
  traj.stop_time = sol.stop_time;
  traj.states.reserve(sol.t.size());
  for (std::size_t k = 0; k < sol.t.size(); ++k) traj.states.push_back(unpack(sol.t[k], chart, sol.y[k]));
  return traj;
}

}  // namespace lossgain
