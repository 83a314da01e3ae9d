#pragma once

// Catalog of concrete loss-gain systems.

#include "lossgain/system.hpp"

#include <string>
#include <vector>

namespace lossgain {

// m = 1, z+ cyclic.  V(z-) = -(w0^2/4) z^2 - (alpha0/6) z^3 - (beta0/8) z^4,
// f(z-) = a z + (b / sqrt 2) z^2, Q = f'.  The reduced equation is
//   z-'' + w^2 z- + alpha z-^2 + beta z-^3 = gamma a Pi.
struct QuarticTranslationalParams {
  double omega0_sq = 1.0;
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double gamma = 0.0;
  double Pi = 0.0;  // value of the translational charge entering w^2

  double omega_sq() const;
  double alpha() const;
  double beta() const;
  // alpha0 that removes the quadratic term.
  double alpha0_for_pure_quartic() const;
};

SystemSpec quartic_translational(const QuarticTranslationalParams& params);

// Pair profile with Q = f'(z-): F+ = z+ f'(z-) / 2, F- = f(z-) / 2.
PairGainProfile translational_profile(std::function<double(double)> f, std::function<double(double)> df,
                                      std::function<double(double)> d2f, std::string description);

enum class RadialProfile { constant, linear };

std::string to_string(RadialProfile profile);

// V(r) = w0^2 r^2 / 4 + alpha0 r^4 / 8 with r^2 = (z+)^2 - (z-)^2; g = c or g = c r.
struct RotationalParams {
  RadialProfile profile = RadialProfile::linear;
  double c = 1.0;
  double omega0_sq = 1.0;
  double alpha0 = 0.0;
  double gamma = 0.0;

  // Coefficient of r^3 in the P_theta = 0 radial equation.
  double alpha() const;
  // Coefficient of r in the P_theta = 0 radial equation.
  double omega_sq() const;
};

SystemSpec rotational_model(const RotationalParams& params);

// F+ = z+ g(r), F- = z- g(r) with r the signed radius sgn(z+) sqrt((z+)^2 - (z-)^2),
// clamped to 0 outside the timelike cone.
PairGainProfile rotational_profile(RadialProfile profile, double c);

// Multi-pair versions used for involution checks; neighbouring pairs are
// coupled through the potential without breaking the symmetry.
SystemSpec translational_chain(int m, const QuarticTranslationalParams& params, double coupling);
SystemSpec rotational_chain(int m, const RotationalParams& params, double coupling);

// Q(x) = sum_k q[k] x^k for every pair, F_odd = int Q dx_odd, F_even = 0.
// V = (w^2/2) sum x_{2i} x_{2i-1} - g sum_{i != j} x_{2i} / (x_{2i-1} - x_{2j-1})^3.
struct CalogeroParams {
  int m = 2;
  double omega_sq = 1.0;
  double g = 1.0;
  double gamma = 0.0;
  std::vector<double> q_coeffs{1.0};
  double collision_distance = 1e-8;
};

SystemSpec calogero_unidirectional(const CalogeroParams& params);

// Constant-Q pair: F = (s x1, s x2) and V = (w^2/2) x1 x2, giving
//   x1'' - 2 s gamma x1' + w^2 x1 = 0,  x2'' + 2 s gamma x2' + w^2 x2 = 0.
SystemSpec bateman_pair(double gamma, double omega_sq, double scale = 0.5);

// Sextic quasi-exactly solvable sector.
struct SexticQesParams {
  double atilde = 1.0;
  double btilde = 0.0;
  int n = 0;
  int p = 0;
  // Raw profile coefficients; only needed for the classical potential.
  double a = 0.0;
  double b = 0.0;
  double gamma = 1.0;

  // atilde = +sqrt(alpha^2 - a^2), btilde = btilde_sign * sqrt(beta^2 - b^2).
  static SexticQesParams from_raw(double alpha, double beta, double a, double b, int n, int p, double gamma,
                                  double btilde_sign = 1.0);
  void validate() const;
};

struct SexticQesModel {
  SexticQesParams params;

  // V'(z) and dV'/dz of the effective one-dimensional problem.
  Jet1 effective_potential(double z) const;
  // f1 = (2/gamma)(a z^3 + b z).
  double f1(double z) const;
  // Classical V(z) with alpha^2 = atilde^2 + a^2, beta^2 = btilde^2 + b^2.
  Jet1 classical_potential(double z) const;
  // m = 1 translational system (z+ cyclic) carrying f1 and V.
  SystemSpec system() const;
};

SexticQesModel sextic_qes_model(const SexticQesParams& params);

// Catalog names understood by the configuration loader.
std::vector<std::string> catalog_names();

}  // namespace lossgain
