#pragma once

// Exact elliptic solution families of the quartic-oscillator reductions,
// their ODE residuals and a bounded-orbit stability gate.

#include "lossgain/models.hpp"
#include "lossgain/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lossgain {

enum class SolutionCase { trans_cn, trans_sn, trans_dn, trans_cn2, rot_I, rot_II_cn, rot_II_sn };

std::string to_string(SolutionCase c);
SolutionCase solution_case_from_string(const std::string& name);
bool is_translational(SolutionCase c);

enum class EllipticKind { sn, cn, dn };

// How the printed second argument of sn/cn/dn is read.  modulus: the printed
// k is the modulus and the library parameter is k^2.  parameter: the printed
// value is handed to the library unchanged, i.e. m = sqrt(k^2).
enum class EllipticReading { modulus, parameter };

std::string to_string(EllipticReading r);

// Frequency variant for the dn family, where Omega is printed without a square root.
enum class DnFrequency { square_root, as_printed };

std::string to_string(DnFrequency f);

struct EllipticSolutionParams {
  SolutionCase kind = SolutionCase::trans_cn;
  EllipticKind function = EllipticKind::cn;
  EllipticReading reading = EllipticReading::modulus;
  double A = 1.0;
  double Omega = 1.0;
  double param = 0.0;       // library parameter m actually used
  double printed_k2 = 0.0;  // value of k^2 from the printed formula
  double C1 = 0.0;          // z+(0) for translational families
  double theta0 = 0.0;      // theta(0) for rotational families
  // Coefficients of the reduced quartic oscillator q'' + w2 q + beta q^3 = 0.
  double omega_sq = 0.0;
  double beta = 0.0;
  QuarticTranslationalParams trans;
  RotationalParams rot;

  // Period of the elliptic factor in t (4K/Omega for sn, cn; 2K/Omega for dn).
  double period() const;
};

// Arithmetic for the four translational windows without any elliptic
// evaluation, so that boundary values can be inspected.
struct FamilyConstants {
  double Omega_sq = 0.0;
  double param = 0.0;
};

FamilyConstants cn_constants(double omega_sq, double beta, double A);
FamilyConstants sn_constants(double omega_sq, double beta, double A);
// dn: Omega^2 = beta A^2 / 2 (square_root) or (beta A^2 / 2)^2 (as_printed);
// the parameter follows from the linear term, m = 2 - |w^2| / Omega^2.
FamilyConstants dn_constants(double omega_sq, double beta, double A, DnFrequency variant);
// Printed k^2 for the dn family, (beta A^2 - |w^2|) / (2 Omega^2) with the square-root Omega.
double dn_printed_k2(double omega_sq, double beta, double A);

// Validates the case window (throws RangeError naming the gate) and fixes
// Omega and the parameter.
EllipticSolutionParams make_trans_solution(SolutionCase kind, const QuarticTranslationalParams& params, double A,
                                           EllipticReading reading = EllipticReading::modulus,
                                           DnFrequency dn_variant = DnFrequency::square_root);
EllipticSolutionParams make_rot_solution(SolutionCase kind, const RotationalParams& params, double A,
                                         EllipticReading reading = EllipticReading::modulus);

struct TransPoint {
  double t = 0.0;
  double z_minus = 0.0;
  double z_minus_dot = 0.0;
  double z_minus_ddot = 0.0;
  double z_plus = 0.0;
  double z_plus_dot = 0.0;
};

struct RotPoint {
  double t = 0.0;
  double r = 0.0;
  double r_dot = 0.0;
  double r_ddot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double z_plus = 0.0;
  double z_minus = 0.0;
};

// z- from the elliptic formula; z+ by adaptive Gauss-Kronrod quadrature of
// z+' = gamma f(z-), accumulated along the (sorted) grid.
std::vector<TransPoint> trans_solution(const EllipticSolutionParams& sol, const std::vector<double>& times);
TransPoint trans_solution(const EllipticSolutionParams& sol, double t);

// r from the elliptic formula; theta by quadrature of theta' = gamma g(r).
std::vector<RotPoint> rot_solution(const EllipticSolutionParams& sol, const std::vector<double>& times);
RotPoint rot_solution(const EllipticSolutionParams& sol, double t);

// Closed-form antiderivatives for z+ / theta with the printed second argument
// read as the parameter.  Valid on the open first half period.
double trans_z_plus_display(const EllipticSolutionParams& sol, double t);
double rot_theta_display(const EllipticSolutionParams& sol, double t);

// Initial data in the z chart matching the closed form at t = 0.
PhaseState initial_state(const EllipticSolutionParams& sol);

struct ResidualReport {
  SolutionCase kind = SolutionCase::trans_cn;
  EllipticReading reading = EllipticReading::modulus;
  double max_residual = 0.0;
  double max_display_deviation = 0.0;  // quadrature vs printed antiderivative
  int samples = 0;
  double t_end = 0.0;
};

// Substitutes the closed form into the governing second-order equation of
// the model (reduced z- equation or the radial equation with P_theta = 0)
// using analytic elliptic derivatives.
ResidualReport residual_check(const EllipticSolutionParams& sol, const SystemSpec& spec,
                              const std::vector<double>& times);

// Uniform grid of n points on [0, periods * period].
std::vector<double> period_grid(const EllipticSolutionParams& sol, double periods, int n);

struct ConventionReport {
  SolutionCase kind = SolutionCase::trans_cn;
  double residual_modulus = 0.0;
  double residual_parameter = 0.0;
  std::optional<EllipticReading> passing;
  std::string note;
};

// Runs the residual with both readings of the printed second argument.
ConventionReport resolve_convention(SolutionCase kind, const QuarticTranslationalParams* trans,
                                    const RotationalParams* rot, double A, double tolerance = 1e-8);

struct DnVariantResult {
  DnFrequency variant = DnFrequency::square_root;
  double Omega = 0.0;
  double param = 0.0;
  double max_residual = 0.0;
  bool passed = false;
  std::string note;
};

struct DnFrequencyReport {
  std::vector<DnVariantResult> variants;
  double printed_k2 = 0.0;
  double ode_param = 0.0;  // parameter demanded by the ODE for the passing variant
  int passing_count = 0;
  std::optional<DnFrequency> passing;
};

DnFrequencyReport resolve_dn_frequency(const QuarticTranslationalParams& params, double A, double tolerance = 1e-8);

struct StabilityVerdict {
  SolutionCase kind = SolutionCase::trans_cn;
  bool bounded = false;
  double growth_ratio = 0.0;  // worst second-half / first-half max ratio
  std::string unbounded_component;
  std::string method;  // closed_form or integration
  std::vector<std::string> recorded_claims;
  std::string verdict;
};

// Bounded-orbit gate over 20 periods: a component counts as bounded when its
// max over the second half of the window is at most 1.05 times its max over
// the first half.  Translational families with Pi != 0 are integrated.
StabilityVerdict stability_gate(const EllipticSolutionParams& sol);

// Translational gate for a charge Pi != 0 (no closed form available).
StabilityVerdict stability_gate_translational(SolutionCase kind, const QuarticTranslationalParams& params, double A);

}  // namespace lossgain
