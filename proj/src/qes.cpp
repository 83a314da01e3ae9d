#include "lossgain/qes.hpp"

#include "lossgain/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lossgain {

namespace {

using cd = std::complex<double>;

bool complex_less(const cd& a, const cd& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

QesProblem build_recursion_matrix(const SexticQesParams& params) {
  params.validate();
  const int n = params.n, p = params.p;
  QesProblem prob;
  prob.params = params;
  prob.matrix = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int j = 0; j <= n; ++j) {
    prob.matrix(j, j) = 4.0 * params.btilde * j;
    if (j + 1 <= n) prob.matrix(j, j + 1) = -2.0 * (j + 1) * (2.0 * j + 1.0 + 2.0 * p);
    if (j >= 1) prob.matrix(j, j - 1) = -4.0 * params.atilde * (n - j + 1);
  }
  return prob;
}

double recursion_matrix_mismatch(const QesProblem& prob) {
  const int n = prob.params.n, p = prob.params.p;
  const double at = prob.params.atilde, bt = prob.params.btilde;
  double worst = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (double y : {-1.3, -0.4, 0.25, 0.7, 1.9}) {
      // -4 y P'' + 2 (2 at y^2 + 2 bt y - 1 - 2p) P' - 4 at n y P with P = y^j
      const double P = std::pow(y, j);
      const double dP = j >= 1 ? j * std::pow(y, j - 1) : 0.0;
      const double d2P = j >= 2 ? j * (j - 1) * std::pow(y, j - 2) : 0.0;
      const double lhs = -4.0 * y * d2P + 2.0 * (2.0 * at * y * y + 2.0 * bt * y - 1.0 - 2.0 * p) * dP -
                         4.0 * at * n * y * P;
      double rhs = 0.0, scale = std::abs(lhs);
      for (int k = 0; k <= n; ++k) {
        const double term = prob.matrix(k, j) * std::pow(y, k);
        rhs += term;
        scale += std::abs(term);
      }
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, scale));
    }
  }
  return worst;
}

std::string to_string(SpectrumMethod m) { return m == SpectrumMethod::eigen ? "eigen" : "determinant-roots"; }

std::vector<double> characteristic_polynomial(const QesProblem& prob) {
  // Continuant of the tridiagonal T + E I, each term a polynomial in E.
  const Eigen::MatrixXd& T = prob.matrix;
  const int N = static_cast<int>(T.rows());
  std::vector<double> prev2{1.0};
  std::vector<double> prev1{T(0, 0), 1.0};
  for (int j = 1; j < N; ++j) {
    std::vector<double> cur(static_cast<std::size_t>(j + 2), 0.0);
    for (std::size_t k = 0; k < prev1.size(); ++k) {
      cur[k] += T(j, j) * prev1[k];
      cur[k + 1] += prev1[k];
    }
    const double off = T(j, j - 1) * T(j - 1, j);
    for (std::size_t k = 0; k < prev2.size(); ++k) cur[k] -= off * prev2[k];
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  return prev1;
}

std::vector<cd> polynomial_roots(const std::vector<double>& coeffs_in) {
  std::vector<double> c = coeffs_in;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  // Monic form.
  const double lead = c.back();
  for (double& x : c) x /= lead;
  auto eval = [&](cd z, cd& dz) {
    cd v = 0.0, d = 0.0;
    for (int k = deg; k >= 0; --k) {
      d = d * z + v;
      v = v * z + c[static_cast<std::size_t>(k)];
    }
    dz = d;
    return v;
  };
  // Cauchy bound for the initial circle.
  double bound = 0.0;
  for (int k = 0; k < deg; ++k) bound = std::max(bound, std::abs(c[static_cast<std::size_t>(k)]));
  bound += 1.0;
  std::vector<cd> z(static_cast<std::size_t>(deg));
  for (int k = 0; k < deg; ++k)
    z[static_cast<std::size_t>(k)] = std::polar(0.5 * bound, 2.0 * std::numbers::pi * (k + 0.25) / deg + 0.4);

  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < deg; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      cd dp;
      const cd pv = eval(zi, dp);
      if (pv == cd(0.0)) continue;
      const cd ratio = pv / dp;
      cd sum = 0.0;
      for (int j = 0; j < deg; ++j)
        if (j != i) sum += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
      const cd w = ratio / (1.0 - ratio * sum);
      zi -= w;
      max_step = std::max(max_step, std::abs(w) / std::max(1.0, std::abs(zi)));
    }
    if (max_step < 1e-15) break;
  }
  // Newton polish.
  for (auto& zi : z) {
    for (int k = 0; k < 5; ++k) {
      cd dp;
      const cd pv = eval(zi, dp);
      if (dp == cd(0.0)) break;
      const cd step = pv / dp;
      zi -= step;
      if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(zi))) break;
    }
  }
  std::sort(z.begin(), z.end(), complex_less);
  return z;
}

Eigen::VectorXd polynomial_coefficients(const QesProblem& prob, double E) {
  const Eigen::MatrixXd& T = prob.matrix;
  const int N = static_cast<int>(T.rows());
  // Forward recursion gives the starting vector; it ignores the last row, so
  // its error grows with j.  Inverse iteration with a slightly shifted
  // matrix then restores a null vector accurate to rounding.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
  c[0] = 1.0;
  for (int j = 0; j + 1 < N; ++j) {
    double s = (T(j, j) + E) * c[j];
    if (j >= 1) s += T(j, j - 1) * c[j - 1];
    c[j + 1] = -s / T(j, j + 1);
  }
  if (N > 1) {
    const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
    Eigen::MatrixXd shifted = T;
    shifted.diagonal().array() += E + 1e-10 * scale;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    for (int it = 0; it < 3; ++it) {
      c = lu.solve(c);
      c /= c.cwiseAbs().maxCoeff();
    }
  }
  Eigen::Index imax = 0;
  c.cwiseAbs().maxCoeff(&imax);
  return c / c[imax];
}

Spectrum spectrum(const QesProblem& prob, SpectrumMethod method) {
  Spectrum sp;
  sp.method = method;
  sp.matrix_mismatch = recursion_matrix_mismatch(prob);
  if (sp.matrix_mismatch > 1e-12)
    throw DomainError("qes spectrum: recursion matrix fails the coefficient-matching check (mismatch " +
                      std::to_string(sp.matrix_mismatch) + ")");

  const Eigen::MatrixXd& T = prob.matrix;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(T, false);
  std::vector<cd> from_eigen;
  for (Eigen::Index i = 0; i < T.rows(); ++i) from_eigen.push_back(-solver.eigenvalues()[i]);
  std::sort(from_eigen.begin(), from_eigen.end(), complex_less);

  const std::vector<double> poly = characteristic_polynomial(prob);
  const std::vector<cd> from_roots = polynomial_roots(poly);

  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < from_eigen.size(); ++i)
    sp.method_agreement = std::max(sp.method_agreement, std::abs(from_eigen[i] - from_roots[i]));

  sp.complex_energies = method == SpectrumMethod::eigen ? from_eigen : from_roots;
  sp.all_real = std::all_of(sp.complex_energies.begin(), sp.complex_energies.end(),
                            [&](const cd& e) { return std::abs(e.imag()) <= 1e-10 * std::max(1.0, std::abs(e)); });

  for (const cd& e : sp.complex_energies) {
    // |p(E)| relative to sum |p_k| |E|^k
    cd v = 0.0;
    double mag = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
      v = v * e + *it;
      mag = mag * std::abs(e) + std::abs(*it);
    }
    sp.max_charpoly_residual = std::max(sp.max_charpoly_residual, std::abs(v) / std::max(1.0, mag));
  }
  for (std::size_t i = 1; i < sp.complex_energies.size(); ++i)
    if (std::abs(sp.complex_energies[i] - sp.complex_energies[i - 1]) < 1e-8 * scale) sp.near_degenerate = true;

  if (sp.all_real) {
    for (const cd& e : sp.complex_energies) sp.energies.push_back(e.real() + 0.0);
    std::sort(sp.energies.begin(), sp.energies.end());
    for (double e : sp.energies) sp.coefficients.push_back(polynomial_coefficients(prob, e));
  }
  return sp;
}

double wavefunction(const QesProblem& prob, const Eigen::VectorXd& c, double z) {
  // P(y) cancels heavily when the coefficients alternate in sign; the extended
  // precision sum keeps that rounding noise out of finite-difference stencils.
  const long double y = static_cast<long double>(z) * z;
  long double P = 0.0L;
  for (Eigen::Index j = c.size() - 1; j >= 0; --j) P = P * y + c[j];
  const long double at = prob.params.atilde, bt = prob.params.btilde;
  const long double pre = prob.params.p == 1 ? z : 1.0L;
  return static_cast<double>(pre * P * std::exp(-0.5L * bt * y - 0.25L * at * y * y));
}

std::vector<double> wavefunction(const QesProblem& prob, const Eigen::VectorXd& c, const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double z : grid) out.push_back(wavefunction(prob, c, z));
  return out;
}

ResidualGrid schrodinger_residual(const QesProblem& prob, double E, const Eigen::VectorXd& c, double step) {
  const SexticQesModel model{prob.params};
  // Half-width where the Gaussian-quartic envelope has decayed well below rounding.
  const double at = prob.params.atilde, bt = prob.params.btilde;
  double L = 6.0;
  if (at > 0.0) L = std::min(L, std::pow(160.0 / at, 0.25) + 1.0);
  else if (bt > 0.0) L = std::min(L, std::sqrt(80.0 / bt) + 1.0);
  ResidualGrid out;
  out.step = step;
  out.half_width = L;
  const int half = static_cast<int>(std::ceil(L / step));
  std::vector<double> phi(static_cast<std::size_t>(2 * half + 1));
  double peak = 0.0;
  for (int i = -half; i <= half; ++i) {
    phi[static_cast<std::size_t>(i + half)] = wavefunction(prob, c, i * step);
    peak = std::max(peak, std::abs(phi[static_cast<std::size_t>(i + half)]));
  }
  // Eighth-order central second difference.
  static constexpr double w[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  for (int i = -half + 4; i <= half - 4; ++i) {
    const auto k = static_cast<std::size_t>(i + half);
    double d2 = w[0] * phi[k];
    for (std::size_t s = 1; s <= 4; ++s) d2 += w[s] * (phi[k + s] + phi[k - s]);
    d2 /= step * step;
    const double z = i * step;
    const double res = -d2 + model.effective_potential(z).value * phi[k] + E * phi[k];
    out.max_residual = std::max(out.max_residual, std::abs(res) / peak);
    ++out.points;
  }
  return out;
}

NormVerdict norm_check(const QesProblem& prob, double E, const Eigen::VectorXd& c) {
  (void)E;
  NormVerdict v;
  const auto density = [&](double z) {
    const double f = wavefunction(prob, c, z);
    return f * f;
  };
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (double L = 6.25; L <= 50.0; L *= 2.0) {
    // Even integrand: twice the half line, split into unit pieces.
    double sum = 0.0;
    for (double a = 0.0; a < L; a += 1.0) {
      double err = 0.0;
      sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, a, std::min(a + 1.0, L), 10,
                                                                           1e-13, &err);
    }
    sum *= 2.0;
    v.cutoff = L;
    v.value = sum;
    if (!std::isfinite(sum)) {
      v.finite = false;
      v.reason = "integrand overflows before |z| = " + std::to_string(L);
      return v;
    }
    if (std::isfinite(previous) && std::abs(sum - previous) <= 1e-10 * std::abs(sum)) {
      v.finite = true;
      v.reason = "converged";
      return v;
    }
    previous = sum;
  }
  v.finite = false;
  v.reason = "no convergence up to |z| = 50";
  return v;
}

std::vector<StokesWedge> stokes_wedges() {
  const double pi = std::numbers::pi;
  return {{0.0, pi / 4, "real-axis wedge, decay for atilde > 0"},
          {pi, pi / 4, "real-axis wedge, decay for atilde > 0"},
          {pi / 2, pi / 4, "imaginary-axis wedge, preferred (matches the atilde = 0, btilde < 0 limit)"},
          {-pi / 2, pi / 4, "imaginary-axis wedge, preferred (matches the atilde = 0, btilde < 0 limit)"}};
}

RadialPotential assemble_radial_potential(RadialProfile profile, double c, std::function<double(double)> V,
                                          double gamma, double l) {
  if (!V) throw SpecError("assemble_radial_potential: V is not set");
  RadialPotential out;
  auto g = [profile, c](double r) { return profile == RadialProfile::constant ? c : c * r; };
  out.potential = [g, V, gamma, l](double r) {
    if (!(r > 0.0)) throw DomainError("radial potential: r must be positive");
    const double gr = g(r);
    return cd(V(r) - 0.25 * gamma * gamma * gr * gr * r * r, l * gamma * gr);
  };
  out.centrifugal = [l](double r) {
    if (!(r > 0.0)) throw DomainError("radial potential: r must be positive");
    return l * l / (r * r);
  };
  out.constant_g = profile == RadialProfile::constant;
  out.note = out.constant_g ? "constant-g: no real spectrum expected" : "no eigensolver attached";
  return out;
}

}  // namespace lossgain
