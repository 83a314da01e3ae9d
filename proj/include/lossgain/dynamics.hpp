#pragma once

// Equations of motion in the x, z and pseudo-polar charts and an
// error-controlled integrator for the first-order system (q, v).

#include "lossgain/system.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace lossgain {

// Accelerations for the coupled Lienard system in the x chart:
//   x''_{2i-1} =  gamma Q_i x'_{2i-1} - 2 dV/dx_{2i}
//   x''_{2i}   = -gamma Q_i x'_{2i}   - 2 dV/dx_{2i-1}
std::vector<double> eom_x(const SystemSpec& spec, const PhaseState& state);

//   z+'' = gamma Q z-' - 2 dV/dz+,   z-'' = gamma Q z+' + 2 dV/dz-
std::vector<double> eom_z(const SystemSpec& spec, const PhaseState& state);

// Rotational models only; state layout (r_i, theta_i).  P_theta is read off
// the velocities, so theta'' follows from differentiating
// theta' = gamma g - 2 P_theta / r^2 at fixed P_theta.
std::vector<double> eom_polar(const SystemSpec& spec, const PhaseState& state);

// Dispatches on state.chart.
std::vector<double> accelerations(const SystemSpec& spec, const PhaseState& state);

CanonicalState momenta_from_velocities(const SystemSpec& spec, const PhaseState& state);
PhaseState velocities_from_momenta(const SystemSpec& spec, const CanonicalState& state);

enum class Method { dopri54, rk4 };

struct IntegratorConfig {
  Method method = Method::dopri54;
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
  double fixed_step = 1e-3;   // rk4 only
  double sample_dt = 0.0;     // <= 0 records every accepted step
  long max_steps = 50'000'000;
  double blow_up_threshold = 1e12;

  void validate() const;
};

enum class TrajectoryStatus { completed, blow_up, step_underflow, non_finite, chart_singularity, step_limit };

std::string to_string(TrajectoryStatus status);
std::string to_string(Method method);

struct IntegratorStats {
  long steps = 0;
  long rejections = 0;
  long rhs_evaluations = 0;
};

// Generic first-order solution.  Samples carry the derivative so that any
// time in range can be recovered by cubic Hermite interpolation.
struct OdeSolution {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> dy;
  IntegratorStats stats;
  TrajectoryStatus status = TrajectoryStatus::completed;
  std::string message;
  double stop_time = 0.0;

  bool ok() const { return status == TrajectoryStatus::completed; }
  Eigen::VectorXd at(double time) const;
};

// dy/dt = rhs(t, y).  The right-hand side may throw SingularityError; that
// ends the run with status chart_singularity.
using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

OdeSolution integrate_ode(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t_end,
                          const IntegratorConfig& config);

struct InvariantLog {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;  // one row per state
};

struct Trajectory {
  Chart chart = Chart::x;
  std::vector<PhaseState> states;
  IntegratorStats stats;
  TrajectoryStatus status = TrajectoryStatus::completed;
  std::string message;
  double stop_time = 0.0;
  InvariantLog log;

  bool ok() const { return status == TrajectoryStatus::completed; }
};

Trajectory integrate(const SystemSpec& spec, const PhaseState& initial, const IntegratorConfig& config, double t_end);

// Packing helpers: y = (q, v).
Eigen::VectorXd pack(const PhaseState& state);
PhaseState unpack(double t, Chart chart, const Eigen::VectorXd& y);

}  // namespace lossgain
