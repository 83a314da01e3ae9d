#pragma once

// Matrix realization of the balanced loss-gain Hamiltonian
//
//   H = Pi^T M Pi + V,  Pi = P + A F(X),  J = dF/dX,  R = AJ - (AJ)^T,  D = MR
//
// with M = I_m (x) sigma_x and A = -(i gamma / 2) I_m (x) sigma_y written as a
// real antisymmetric block matrix.  J is block diagonal with 2x2 blocks, one
// per pair, so D = gamma chi_m (x) sigma_z with chi_m = diag(Q_i / 2).

#include "lossgain/system.hpp"

#include <span>
#include <string>
#include <vector>

namespace lossgain {

struct MatrixRep {
  Eigen::MatrixXd M;
  Eigen::MatrixXd A;
  Eigen::MatrixXd J;
  Eigen::MatrixXd R;
  Eigen::MatrixXd D;
  std::vector<double> Q;
};

// Evaluates the realization at a point given in the x chart (length 2m).
MatrixRep build_matrix_rep(const SystemSpec& spec, std::span<const double> x);

struct StructureCheck {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
};

struct StructureReport {
  double tolerance = 1e-12;
  std::vector<StructureCheck> checks;

  bool all_passed() const;
  const StructureCheck& check(const std::string& name) const;
};

// Symmetry of M and D, antisymmetry of A and R, MR = D with D diagonal, the
// three anticommutators, trace(D) = 0 and the pairwise balance
// diag(D) = (gamma/2)(Q_1, -Q_1, ..., Q_m, -Q_m).
StructureReport verify_structure(const MatrixRep& rep, double gamma, double tolerance = 1e-12);

// z+_i = (x_{2i-1} + x_{2i}) / sqrt 2,  z-_i = (x_{2i-1} - x_{2i}) / sqrt 2.
// The map is its own inverse, so the same routine implements both directions.
std::vector<double> pair_rotate(std::span<const double> values);

PhaseState x_to_z(const PhaseState& state);
PhaseState z_to_x(const PhaseState& state);

// Pseudo-polar chart z+ = r cosh(theta), z- = r sinh(theta); valid for
// z+ > |z-| (r > 0).  Throws SingularityError outside the timelike region.
PhaseState z_to_polar(const PhaseState& state);
PhaseState polar_to_z(const PhaseState& state);

// Converts between any two charts.
PhaseState to_chart(const PhaseState& state, Chart target);

// Checks that supplied profile Jacobians agree with central differences and
// that the x- and z-chart views agree under the orthogonal map.
struct ProfileCheck {
  double max_derivative_error = 0.0;  // relative
  double max_chart_error = 0.0;       // absolute
  bool passed = false;
};

ProfileCheck check_profile(const PairGainProfile& profile, std::span<const Eigen::Vector2d> z_points,
                           double derivative_tolerance = 1e-6, double chart_tolerance = 1e-12);

// Central-difference step used throughout for derivative validation.
double fd_step(double x);

}  // namespace lossgain
