#pragma once

// Jacobi elliptic functions and Legendre elliptic integrals of real argument.
// The second argument is always the parameter m = k^2, restricted to [0, 1).

namespace lossgain::elliptic {

struct JacobiValues {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
  double am = 0.0;
};

// Descending Landen / AGM scheme after range reduction to |u| <= K(m).
JacobiValues jacobi(double u, double m);

double complete_K(double m);
double complete_E(double m);

// Legendre incomplete integrals for any real phi; quasi-periodic extension
// F(phi + j pi) = F(phi) + 2 j K and likewise for E.
double incomplete_F(double phi, double m);
double incomplete_E(double phi, double m);

// Carlson symmetric forms.  Arguments non-negative, at most one zero.
double carlson_RF(double x, double y, double z);
double carlson_RD(double x, double y, double z);

}  // namespace lossgain::elliptic
