#pragma once

// Quasi-exactly solvable sextic sector: the finite polynomial recursion, its
// spectrum by two independent routes, eigenfunctions, real-axis norms and the
// (unsolved) complex radial potential of the rotational model.

#include "lossgain/models.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace lossgain {

struct QesProblem {
  SexticQesParams params;
  // Row j: T(j, j+1) = -2 (j+1)(2j+1+2p), T(j, j) = 4 btilde j, T(j, j-1) = -4 atilde (n-j+1).
  // P_n = sum c_j y^j solves the polynomial equation iff T c = -E c.
  Eigen::MatrixXd matrix;
  double k1 = 0.0;
};

QesProblem build_recursion_matrix(const SexticQesParams& params);

// Applies the second-order operator acting on P(y) to each monomial y^j at
// sample points and compares with column j of the matrix.  Returns the max
// relative mismatch.
double recursion_matrix_mismatch(const QesProblem& problem);

enum class SpectrumMethod { eigen, determinant_roots };

std::string to_string(SpectrumMethod m);

struct Spectrum {
  SpectrumMethod method = SpectrumMethod::eigen;
  std::vector<double> energies;                   // ascending; populated when all_real
  std::vector<std::complex<double>> complex_energies;  // always populated, sorted
  bool all_real = true;
  std::vector<Eigen::VectorXd> coefficients;  // per real energy, max |c_j| = 1
  bool near_degenerate = false;
  double max_charpoly_residual = 0.0;  // scaled |det(T + E I)|
  double method_agreement = 0.0;       // max |E_eigen - E_roots|
  double matrix_mismatch = 0.0;
};

// Both routes are always run; `method` only selects which list is reported.
Spectrum spectrum(const QesProblem& problem, SpectrumMethod method = SpectrumMethod::eigen);

// det(T + E I) as polynomial coefficients in E, lowest degree first.
std::vector<double> characteristic_polynomial(const QesProblem& problem);

// Polynomial roots by Aberth-Ehrlich iteration with Newton polishing.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

// Null vector of T + E I by forward recursion, normalized to max |c_j| = 1.
Eigen::VectorXd polynomial_coefficients(const QesProblem& problem, double E);

// phi(z) = z^p P(z^2) exp(-btilde z^2/2 - atilde z^4/4)
double wavefunction(const QesProblem& problem, const Eigen::VectorXd& c, double z);
std::vector<double> wavefunction(const QesProblem& problem, const Eigen::VectorXd& c, const std::vector<double>& grid);

struct ResidualGrid {
  double max_residual = 0.0;  // max |-phi'' + V' phi + E phi| / max |phi|
  double half_width = 0.0;
  double step = 0.0;
  int points = 0;
};

// Eighth-order central differences on a uniform grid over [-L, L].
ResidualGrid schrodinger_residual(const QesProblem& problem, double E, const Eigen::VectorXd& c, double step = 5e-3);

struct NormVerdict {
  bool finite = false;
  double value = 0.0;
  double cutoff = 0.0;
  std::string reason;
};

// Adaptive quadrature of |phi|^2 over the real line with cutoff doubling up to |z| = 50.
NormVerdict norm_check(const QesProblem& problem, double E, const Eigen::VectorXd& c);

struct StokesWedge {
  double centre = 0.0;   // radians
  double opening = 0.0;  // radians
  std::string role;
};

// Sectors of the complex plane where the eigenfunctions decay (documented only).
std::vector<StokesWedge> stokes_wedges();

struct RadialPotential {
  std::function<std::complex<double>(double)> potential;  // V(r) - (gamma^2/4) g^2 r^2 + i l gamma g
  std::function<double(double)> centrifugal;              // l^2 / r^2
  bool constant_g = false;
  std::string note;
};

RadialPotential assemble_radial_potential(RadialProfile profile, double c, std::function<double(double)> V,
                                          double gamma, double l);

}  // namespace lossgain
