#include "lossgain/elliptic.hpp"

#include "lossgain/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lossgain::elliptic {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxLanden = 64;

void require_parameter(double m, const char* where) {
  if (!(m >= 0.0 && m < 1.0))
    throw DomainError(std::string(where) + ": elliptic parameter must lie in [0, 1), got " + std::to_string(m));
}

// Arithmetic-geometric mean of (1, sqrt(1 - m)), also returning
// sum 2^(n-1) c_n^2 with c_0^2 = m for the complete integral of the second kind.
struct AgmResult {
  double a = 1.0;
  double c_sum = 0.0;
};

AgmResult agm(double m) {
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double weight = 0.5;
  AgmResult out;
  out.c_sum = weight * m;
  for (int n = 0; n < kMaxLanden; ++n) {
    const double c = 0.5 * (a - b);
    if (std::abs(c) <= kEps * a) break;
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    weight *= 2.0;
    out.c_sum += weight * c * c;
  }
  out.a = a;
  return out;
}

// am(u | m) for |u| <= K(m).
double amplitude_reduced(double u, double m) {
  if (m == 0.0) return u;
  std::array<double, kMaxLanden + 1> a{};
  std::array<double, kMaxLanden + 1> c{};
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (std::abs(c[static_cast<std::size_t>(n)]) > kEps * a[static_cast<std::size_t>(n)] && n < kMaxLanden) {
    const auto i = static_cast<std::size_t>(n);
    a[i + 1] = 0.5 * (a[i] + b);
    c[i + 1] = 0.5 * (a[i] - b);
    b = std::sqrt(a[i] * b);
    ++n;
  }
  double phi = std::ldexp(a[static_cast<std::size_t>(n)] * u, n);
  for (int j = n; j > 0; --j) {
    const auto i = static_cast<std::size_t>(j);
    phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  return phi;
}

}  // namespace

double complete_K(double m) {
  require_parameter(m, "complete_K");
  return std::numbers::pi / (2.0 * agm(m).a);
}

double complete_E(double m) {
  require_parameter(m, "complete_E");
  const AgmResult r = agm(m);
  return std::numbers::pi / (2.0 * r.a) * (1.0 - r.c_sum);
}

JacobiValues jacobi(double u, double m) {
  require_parameter(m, "jacobi");
  if (!std::isfinite(u)) throw DomainError("jacobi: argument must be finite");
  // am(u + 2jK) = am(u) + j pi
  const double K = complete_K(m);
  const double j = std::nearbyint(u / (2.0 * K));
  const double reduced = u - 2.0 * K * j;
  const double phi = amplitude_reduced(reduced, m);
  JacobiValues v;
  v.am = phi + j * std::numbers::pi;
  v.sn = std::sin(v.am);
  v.cn = std::cos(v.am);
  v.dn = std::sqrt(1.0 - m * v.sn * v.sn);
  return v;
}

double carlson_RF(double x, double y, double z) {
  if (x < 0 || y < 0 || z < 0 || (x == 0) + (y == 0) + (z == 0) > 1)
    throw DomainError("carlson_RF: arguments must be non-negative with at most one zero");
  const double tol = std::pow(3.0 * kEps, 1.0 / 6.0) * 0.25;
  for (int it = 0; it < 200; ++it) {
    const double mu = (x + y + z) / 3.0;
    const double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < tol) {
      const double e2 = dx * dy - dz * dz;
      const double e3 = dx * dy * dz;
      return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(mu);
    }
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * (sy + sz) + sy * sz;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
  }
  throw DomainError("carlson_RF: duplication did not converge");
}

double carlson_RD(double x, double y, double z) {
  if (x < 0 || y < 0 || z <= 0 || (x == 0 && y == 0))
    throw DomainError("carlson_RD: need x, y >= 0 (not both zero) and z > 0");
  const double tol = std::pow(kEps / 3.0, 1.0 / 6.0) * 0.25;
  double sum = 0.0;
  double factor = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mu = (x + y + 3.0 * z) / 5.0;
    const double dx = 1.0 - x / mu, dy = 1.0 - y / mu, dz = 1.0 - z / mu;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < tol) {
      const double ea = dx * dy;
      const double eb = dz * dz;
      const double ec = ea - eb;
      const double ed = ea - 6.0 * eb;
      const double ef = ed + ec + ec;
      const double s1 = ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * dz * ef);
      const double s2 = dz * (ef / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea));
      return 3.0 * sum + factor * (1.0 + s1 + s2) / (mu * std::sqrt(mu));
    }
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * (sy + sz) + sy * sz;
    sum += factor / (sz * (z + lambda));
    factor *= 0.25;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
  }
  throw DomainError("carlson_RD: duplication did not converge");
}

namespace {

// Splits phi = phi_r + j pi with |phi_r| <= pi/2.
double reduce_angle(double phi, double& j) {
  j = std::nearbyint(phi / std::numbers::pi);
  return phi - j * std::numbers::pi;
}

}  // namespace

double incomplete_F(double phi, double m) {
  require_parameter(m, "incomplete_F");
  if (!std::isfinite(phi)) throw DomainError("incomplete_F: amplitude must be finite");
  double j = 0.0;
  const double p = reduce_angle(phi, j);
  const double s = std::sin(p), c = std::cos(p);
  const double base = s == 0.0 ? 0.0 : s * carlson_RF(c * c, 1.0 - m * s * s, 1.0);
  return base + 2.0 * j * complete_K(m);
}

double incomplete_E(double phi, double m) {
  require_parameter(m, "incomplete_E");
  if (!std::isfinite(phi)) throw DomainError("incomplete_E: amplitude must be finite");
  double j = 0.0;
  const double p = reduce_angle(phi, j);
  const double s = std::sin(p), c = std::cos(p);
  double base = 0.0;
  if (s != 0.0) {
    const double x = c * c, y = 1.0 - m * s * s;
    base = s * carlson_RF(x, y, 1.0);
    if (m != 0.0) base -= m / 3.0 * s * s * s * carlson_RD(x, y, 1.0);
  }
  return base + 2.0 * j * complete_E(m);
}

}  // namespace lossgain::elliptic
