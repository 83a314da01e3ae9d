#include "lossgain/models.hpp"

#include "lossgain/errors.hpp"

#include <cmath>
#include <numbers>

namespace lossgain {

namespace {

const double kSqrt2 = std::numbers::sqrt2;

}  // namespace

double QuarticTranslationalParams::omega_sq() const {
  return omega0_sq - gamma * (kSqrt2 * Pi * b + gamma * a * a);
}

double QuarticTranslationalParams::alpha() const { return alpha0 - 3.0 / kSqrt2 * a * b * gamma * gamma; }

double QuarticTranslationalParams::beta() const { return beta0 - gamma * gamma * b * b; }

double QuarticTranslationalParams::alpha0_for_pure_quartic() const { return 3.0 / kSqrt2 * a * b * gamma * gamma; }

PairGainProfile translational_profile(std::function<double(double)> f, std::function<double(double)> df,
                                      std::function<double(double)> d2f, std::string description) {
  PairGainProfile p = PairGainProfile::in_z(
      [df, d2f, f](double zp, double zm) {
        const double q = df(zm);
        PairJet jet;
        jet.first = 0.5 * zp * q;
        jet.second = 0.5 * f(zm);
        jet.jacobian << 0.5 * q, 0.5 * zp * d2f(zm), 0.0, 0.5 * q;
        return jet;
      },
      std::move(description));
  p.primitive = f;
  GaugePrimitives gauge;
  gauge.along_minus = [f, df](double, double zm) { return Jet2{f(zm), Eigen::Vector2d(0.0, df(zm))}; };
  gauge.along_plus = [df, d2f](double zp, double zm) {
    const double q = df(zm);
    return Jet2{zp * q, Eigen::Vector2d(q, zp * d2f(zm))};
  };
  p.gauge = gauge;
  return p;
}

namespace {

PairGainProfile quartic_profile(double a, double b) {
  return translational_profile([a, b](double z) { return a * z + b / kSqrt2 * z * z; },
                               [a, b](double z) { return a + kSqrt2 * b * z; }, [b](double) { return kSqrt2 * b; },
                               "f = a z- + (b/sqrt2) z-^2");
}

// V_i(z-) and its derivative for the quartic translational family.
double quartic_potential(const QuarticTranslationalParams& p, double z, double& dv) {
  dv = -0.5 * p.omega0_sq * z - 0.5 * p.alpha0 * z * z - 0.5 * p.beta0 * z * z * z;
  return -0.25 * p.omega0_sq * z * z - p.alpha0 / 6.0 * z * z * z - 0.125 * p.beta0 * z * z * z * z;
}

}  // namespace

SystemSpec quartic_translational(const QuarticTranslationalParams& params) {
  return translational_chain(1, params, 0.0);
}

SystemSpec translational_chain(int m, const QuarticTranslationalParams& params, double coupling) {
  if (m <= 0) throw SpecError("translational_chain: pair count must be positive");
  SystemSpec spec;
  spec.name = m == 1 ? "quartic_translational" : "quartic_translational_chain";
  spec.pairs = m;
  spec.gamma = params.gamma;
  spec.symmetry = Symmetry::translational;
  spec.cyclic = CyclicCoordinate::z_plus;
  for (int i = 0; i < m; ++i) {
    // Distinct but related profiles so that pairs are not copies of each other.
    const double scale = 1.0 + 0.25 * i;
    spec.profiles.push_back(quartic_profile(params.a * scale, params.b / scale));
  }
  spec.potential.chart = Chart::z;
  spec.potential.description = "quartic in z-, nearest-neighbour coupling z-_i z-_{i+1}";
  spec.potential.eval = [params, coupling, m](std::span<const double> q, std::span<double> grad) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto a = static_cast<std::size_t>(2 * i);
      double dv = 0.0;
      v += quartic_potential(params, q[a + 1], dv);
      grad[a] = 0.0;
      grad[a + 1] = dv;
    }
    for (int i = 0; i + 1 < m; ++i) {
      const auto a = static_cast<std::size_t>(2 * i + 1), b = a + 2;
      v += coupling * q[a] * q[b];
      grad[a] += coupling * q[b];
      grad[b] += coupling * q[a];
    }
    return v;
  };
  return spec;
}

std::string to_string(RadialProfile profile) { return profile == RadialProfile::constant ? "constant" : "linear"; }

double RotationalParams::alpha() const {
  return profile == RadialProfile::linear ? alpha0 - 2.0 * gamma * gamma * c * c : alpha0;
}

double RotationalParams::omega_sq() const {
  return profile == RadialProfile::constant ? omega0_sq - gamma * gamma * c * c : omega0_sq;
}

PairGainProfile rotational_profile(RadialProfile profile, double c) {
  PairGainProfile p;
  if (profile == RadialProfile::constant) {
    p = PairGainProfile::in_z(
        [c](double zp, double zm) {
          PairJet jet;
          jet.first = c * zp;
          jet.second = c * zm;
          jet.jacobian << c, 0.0, 0.0, c;
          return jet;
        },
        "g = c");
    p.radial = [c](double) { return Jet1{c, 0.0}; };
    GaugePrimitives gauge;
    gauge.along_minus = [c](double, double zm) { return Jet2{2.0 * c * zm, Eigen::Vector2d(0.0, 2.0 * c)}; };
    gauge.along_plus = [c](double zp, double) { return Jet2{2.0 * c * zp, Eigen::Vector2d(2.0 * c, 0.0)}; };
    p.gauge = gauge;
    return p;
  }
  p = PairGainProfile::in_z(
      [c](double zp, double zm) {
        const double s = zp * zp - zm * zm;
        const double r = s > 0.0 ? std::copysign(std::sqrt(s), zp) : 0.0;
        PairJet jet;
        jet.first = c * zp * r;
        jet.second = c * zm * r;
        if (r != 0.0) {
          // dr/dz+ = z+/r, dr/dz- = -z-/r
          jet.jacobian << c * (r + zp * zp / r), -c * zp * zm / r, c * zm * zp / r, c * (r - zm * zm / r);
        }
        return jet;
      },
      "g = c r");
  p.radial = [c](double r) { return Jet1{c * r, c}; };
  return p;
}

namespace {

SystemSpec rotational_system(int m, const RotationalParams& params, double coupling) {
  if (m <= 0) throw SpecError("rotational_chain: pair count must be positive");
  SystemSpec spec;
  spec.name = params.profile == RadialProfile::constant ? "rotational_constant_g" : "rotational_linear_g";
  if (m > 1) spec.name += "_chain";
  spec.pairs = m;
  spec.gamma = params.gamma;
  spec.symmetry = Symmetry::rotational;
  for (int i = 0; i < m; ++i) spec.profiles.push_back(rotational_profile(params.profile, params.c * (1.0 + 0.2 * i)));
  spec.potential.chart = Chart::z;
  spec.potential.description = "w0^2 r^2/4 + alpha0 r^4/8 per pair, coupling r_i^2 r_{i+1}^2";
  spec.potential.eval = [params, coupling, m](std::span<const double> q, std::span<double> grad) {
    // Work with s = r^2 = (z+)^2 - (z-)^2, ds/dz+ = 2 z+, ds/dz- = -2 z-.
    std::vector<double> s(static_cast<std::size_t>(m)), dvds(static_cast<std::size_t>(m));
    double v = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto a = static_cast<std::size_t>(2 * i);
      const auto k = static_cast<std::size_t>(i);
      s[k] = q[a] * q[a] - q[a + 1] * q[a + 1];
      v += 0.25 * params.omega0_sq * s[k] + 0.125 * params.alpha0 * s[k] * s[k];
      dvds[k] = 0.25 * params.omega0_sq + 0.25 * params.alpha0 * s[k];
    }
    for (int i = 0; i + 1 < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      v += coupling * s[k] * s[k + 1];
      dvds[k] += coupling * s[k + 1];
      dvds[k + 1] += coupling * s[k];
    }
    for (int i = 0; i < m; ++i) {
      const auto a = static_cast<std::size_t>(2 * i);
      const auto k = static_cast<std::size_t>(i);
      grad[a] = 2.0 * q[a] * dvds[k];
      grad[a + 1] = -2.0 * q[a + 1] * dvds[k];
    }
    return v;
  };
  return spec;
}

}  // namespace

SystemSpec rotational_model(const RotationalParams& params) { return rotational_system(1, params, 0.0); }

SystemSpec rotational_chain(int m, const RotationalParams& params, double coupling) {
  return rotational_system(m, params, coupling);
}

SystemSpec calogero_unidirectional(const CalogeroParams& params) {
  if (params.m < 2) throw SpecError("calogero_unidirectional: needs at least two pairs");
  if (params.q_coeffs.empty()) throw SpecError("calogero_unidirectional: Q profile has no coefficients");
  SystemSpec spec;
  spec.name = "calogero_unidirectional";
  spec.pairs = params.m;
  spec.gamma = params.gamma;
  spec.symmetry = Symmetry::none;

  const std::vector<double> q = params.q_coeffs;
  PairGainProfile profile = PairGainProfile::in_x(
      [q](double x_odd, double) {
        double F = 0.0, Q = 0.0, power = 1.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
          Q += q[k] * power;
          power *= x_odd;
          F += q[k] * power / static_cast<double>(k + 1);
        }
        PairJet jet;
        jet.first = F;
        jet.second = 0.0;
        jet.jacobian << Q, 0.0, 0.0, 0.0;
        return jet;
      },
      "F_odd = int Q(x_odd), F_even = 0");
  spec.profiles.assign(static_cast<std::size_t>(params.m), profile);

  spec.potential.chart = Chart::x;
  spec.potential.description = "unidirectional rational Calogero";
  const int m = params.m;
  const double w2 = params.omega_sq, g = params.g, eps = params.collision_distance;
  spec.potential.eval = [m, w2, g, eps](std::span<const double> x, std::span<double> grad) {
    double v = 0.0;
    for (int k = 0; k < m; ++k) {
      const auto odd = static_cast<std::size_t>(2 * k), even = odd + 1;
      v += 0.5 * w2 * x[even] * x[odd];
      grad[odd] = 0.5 * w2 * x[even];
      grad[even] = 0.5 * w2 * x[odd];
    }
    for (int k = 0; k < m; ++k) {
      const auto ko = static_cast<std::size_t>(2 * k), ke = ko + 1;
      for (int j = 0; j < m; ++j) {
        if (j == k) continue;
        const auto jo = static_cast<std::size_t>(2 * j), je = jo + 1;
        const double d = x[ko] - x[jo];
        if (std::abs(d) < eps)
          throw SingularityError("calogero_unidirectional: particles " + std::to_string(k + 1) + " and " +
                                 std::to_string(j + 1) + " collide (|x_odd difference| < " + std::to_string(eps) + ")");
        const double d3 = d * d * d;
        v -= g * x[ke] / d3;
        grad[ke] -= g / d3;
        grad[ko] += 3.0 * g * (x[ke] - x[je]) / (d3 * d);
      }
    }
    return v;
  };
  return spec;
}

SystemSpec bateman_pair(double gamma, double omega_sq, double scale) {
  SystemSpec spec;
  spec.name = "bateman_pair";
  spec.pairs = 1;
  spec.gamma = gamma;
  spec.symmetry = Symmetry::none;
  spec.profiles.push_back(PairGainProfile::in_x(
      [scale](double x1, double x2) {
        PairJet jet;
        jet.first = scale * x1;
        jet.second = scale * x2;
        jet.jacobian << scale, 0.0, 0.0, scale;
        return jet;
      },
      "F = s (x1, x2)"));
  spec.potential.chart = Chart::x;
  spec.potential.description = "(w^2/2) x1 x2";
  spec.potential.eval = [omega_sq](std::span<const double> x, std::span<double> grad) {
    grad[0] = 0.5 * omega_sq * x[1];
    grad[1] = 0.5 * omega_sq * x[0];
    return 0.5 * omega_sq * x[0] * x[1];
  };
  return spec;
}

SexticQesParams SexticQesParams::from_raw(double alpha, double beta, double a, double b, int n, int p, double gamma,
                                          double btilde_sign) {
  const double at2 = alpha * alpha - a * a;
  const double bt2 = beta * beta - b * b;
  if (at2 < 0.0) throw SpecError("sextic_qes: alpha^2 - a^2 < 0, so atilde is not real");
  if (bt2 < 0.0) throw SpecError("sextic_qes: beta^2 - b^2 < 0, so btilde is not real");
  SexticQesParams out;
  out.atilde = std::sqrt(at2);
  out.btilde = std::copysign(std::sqrt(bt2), btilde_sign);
  out.n = n;
  out.p = p;
  out.a = a;
  out.b = b;
  out.gamma = gamma;
  out.validate();
  return out;
}

void SexticQesParams::validate() const {
  if (n < 0) throw SpecError("sextic_qes: n must be a non-negative integer");
  if (p != 0 && p != 1) throw SpecError("sextic_qes: p must be 0 or 1");
  if (!std::isfinite(atilde) || !std::isfinite(btilde)) throw SpecError("sextic_qes: atilde and btilde must be finite");
}

Jet1 SexticQesModel::effective_potential(double z) const {
  const double A = params.atilde, B = params.btilde;
  const double c2 = B * B - A * (4.0 * params.n + 2.0 * params.p + 3.0);
  const double z2 = z * z;
  return {A * A * z2 * z2 * z2 + 2.0 * A * B * z2 * z2 + c2 * z2 - B * (1.0 + 2.0 * params.p),
          6.0 * A * A * z2 * z2 * z + 8.0 * A * B * z2 * z + 2.0 * c2 * z};
}

double SexticQesModel::f1(double z) const {
  if (params.gamma == 0.0) throw DomainError("sextic_qes: f1 needs gamma != 0");
  return 2.0 / params.gamma * (params.a * z * z * z + params.b * z);
}

Jet1 SexticQesModel::classical_potential(double z) const {
  const double A = params.atilde, B = params.btilde, a = params.a, b = params.b;
  const double alpha2 = A * A + a * a, beta2 = B * B + b * b;
  const double c4 = -2.0 * A * B - 2.0 * a * b;
  const double c2 = -beta2 + A * (4.0 * params.n + 2.0 * params.p + 3.0);
  const double z2 = z * z;
  return {-alpha2 * z2 * z2 * z2 + c4 * z2 * z2 + c2 * z2 + B * (1.0 + 2.0 * params.p),
          -6.0 * alpha2 * z2 * z2 * z + 4.0 * c4 * z2 * z + 2.0 * c2 * z};
}

SystemSpec SexticQesModel::system() const {
  if (params.gamma == 0.0) throw SpecError("sextic_qes: the classical system needs gamma != 0");
  const double k = 2.0 / params.gamma, a = params.a, b = params.b;
  SystemSpec spec;
  spec.name = "sextic_qes";
  spec.pairs = 1;
  spec.gamma = params.gamma;
  spec.symmetry = Symmetry::translational;
  spec.profiles.push_back(translational_profile([k, a, b](double z) { return k * (a * z * z * z + b * z); },
                                                [k, a, b](double z) { return k * (3.0 * a * z * z + b); },
                                                [k, a](double z) { return k * 6.0 * a * z; },
                                                "f1 = (2/gamma)(a z^3 + b z)"));
  spec.potential.chart = Chart::z;
  spec.potential.description = "sextic classical potential in z-";
  const SexticQesModel self = *this;
  spec.potential.eval = [self](std::span<const double> q, std::span<double> grad) {
    const Jet1 v = self.classical_potential(q[1]);
    grad[0] = 0.0;
    grad[1] = v.derivative;
    return v.value;
  };
  return spec;
}

SexticQesModel sextic_qes_model(const SexticQesParams& params) {
  params.validate();
  return SexticQesModel{params};
}

std::vector<std::string> catalog_names() {
  return {"quartic_translational", "rotational_constant_g", "rotational_linear_g", "calogero_unidirectional",
          "sextic_qes"};
}

}  // namespace lossgain
