#pragma once

// Conserved charges, Poisson brackets in the canonical z chart and the
// gauge-equivalence check for Lagrangians that differ by a total derivative.

#include "lossgain/dynamics.hpp"
#include "lossgain/system.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lossgain {

// x form: sum [2 P_o P_e + gamma (F_o P_o - F_e P_e) - gamma^2 F_o F_e / 2] + V
double energy_x_form(const SystemSpec& spec, const CanonicalState& state);
// z form: sum [(P+ + gamma F-/2)^2 - (P- - gamma F+/2)^2] + V
double energy_z_form(const SystemSpec& spec, const CanonicalState& state);
// Any chart; polar states are mapped to z first.
double energy(const SystemSpec& spec, const PhaseState& state);

// Pi_i = 2 P+ + gamma (F- - f(z-)) for cyclic z+ (= z+' - gamma f), or
// Pi-_i = -2 P- + gamma (F+ - f(z+)) for cyclic z- (= z-' - gamma f).
std::vector<double> translational_charges(const SystemSpec& spec, const PhaseState& state);
std::vector<double> translational_charges(const SystemSpec& spec, const PhaseState& state,
                                          CyclicCoordinate direction);

// L_i = 2 (z- P+ + z+ P-) = (z- z+' - z+ z-') + gamma r^2 g.
std::vector<double> rotational_charges(const SystemSpec& spec, const PhaseState& state);

struct ChargeSet {
  double H = 0.0;
  std::optional<std::vector<double>> Pi;
  std::optional<std::vector<double>> L;
  PhaseState point;
};

ChargeSet evaluate_charges(const SystemSpec& spec, const PhaseState& state);

// Scalar function on canonical z-chart phase space with optional analytic
// gradient.
struct PhaseGradient {
  double value = 0.0;
  std::vector<double> dq;
  std::vector<double> dp;
};

struct PhaseObservable {
  std::string name;
  std::function<double(const CanonicalState&)> value;
  std::function<PhaseGradient(const CanonicalState&)> gradient;  // may be empty
};

PhaseObservable hamiltonian_observable(const SystemSpec& spec);
PhaseObservable translational_charge_observable(const SystemSpec& spec, int pair,
                                                CyclicCoordinate direction = CyclicCoordinate::z_plus);
// P_theta_i = L_i / 2.
PhaseObservable angular_momentum_observable(const SystemSpec& spec, int pair);
PhaseObservable coordinate_observable(int index, int dof);
PhaseObservable momentum_observable(int index, int dof);

struct BracketResult {
  double value = 0.0;
  double fd_value = 0.0;
  double fd_discrepancy = 0.0;
  bool fd_fallback = false;  // analytic gradient missing for at least one argument
  bool cross_check_passed = true;
};

// {A, B} = sum_k dA/dq_k dB/dp_k - dA/dp_k dB/dq_k at a z-chart canonical point.
BracketResult poisson_bracket(const PhaseObservable& A, const PhaseObservable& B, const CanonicalState& point,
                              double cross_check_tolerance = 1e-6);

struct InvolutionConfig {
  int samples = 100;
  std::uint64_t seed = 20240601;
  double tolerance = 1e-10;
  double box = 1.0;  // sampling half-width for coordinates and momenta
};

struct BracketSummary {
  std::string a;
  std::string b;
  double max_abs = 0.0;
  double max_fd_discrepancy = 0.0;
  bool fd_fallback = false;
};

struct InvolutionReport {
  std::string model;
  int pairs = 0;
  int charge_count = 0;
  int samples = 0;
  std::vector<BracketSummary> brackets;
  double max_bracket = 0.0;
  bool passed = false;
  std::string verdict;
};

// Samples canonical points (timelike region for rotational models) and
// evaluates every bracket among H and the m symmetry charges.
InvolutionReport involution_suite(const SystemSpec& spec, const InvolutionConfig& config = {});

// Fills trajectory.log with H and the applicable charges.
void attach_invariants(const SystemSpec& spec, Trajectory& trajectory);

struct DriftEntry {
  std::string name;
  double initial = 0.0;
  double max_drift = 0.0;  // max |X(t) - X(0)| / max(1, |X(0)|)
};

std::vector<DriftEntry> drift_summary(const InvariantLog& log);

enum class GaugeRoute { standard, cyclic_plus, cyclic_minus };

std::string to_string(GaugeRoute route);

// z-chart accelerations derived from the Lagrangian of the given route.
std::vector<double> gauge_accelerations(const SystemSpec& spec, GaugeRoute route, const PhaseState& z_state);

struct GaugeReport {
  std::string model;
  double t_end = 0.0;
  double max_standard_vs_plus = 0.0;
  double max_standard_vs_minus = 0.0;
  double max_plus_vs_minus = 0.0;
  double max_rhs_difference = 0.0;  // at the initial point
  std::optional<double> routhian_deviation;  // reduced vs full z-(t)
  double tolerance = 1e-8;
  bool passed = false;
  std::string message;
};

GaugeReport gauge_equivalence(const SystemSpec& spec, const PhaseState& initial, const IntegratorConfig& config,
                              double t_end, double tolerance = 1e-8);

}  // namespace lossgain
