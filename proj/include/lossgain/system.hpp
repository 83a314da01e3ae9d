#pragma once

// Core description of a many-particle system with pairwise balanced loss and
// gain: N = 2m coordinates grouped in m pairs (x_{2i-1}, x_{2i}), a gain
// parameter gamma, one gain profile per pair and a potential.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lossgain {

enum class Chart { x, z, polar };

std::string to_string(Chart chart);

enum class Symmetry { none, translational, rotational };

std::string to_string(Symmetry symmetry);

// Which coordinate of each pair is cyclic for a translational model.
//   z_plus  : V = V({z-}), Q_i = Q_i(z-_i); charges Pi_i = 2 P_{z+} + gamma (F- - f)
//   z_minus : V = V({z+}), Q_i = Q_i(z+_i); charges Pi-_i = -2 P_{z-} + gamma (F+ - f+)
enum class CyclicCoordinate { z_plus, z_minus };

struct Jet1 {
  double value = 0.0;
  double derivative = 0.0;
};

struct Jet2 {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

// Value and Jacobian of a pair gain profile in one chart.  In the x chart
// (first, second) = (F_{2i-1}, F_{2i}) as functions of (x_{2i-1}, x_{2i}); in
// the z chart (first, second) = (F+, F-) as functions of (z+, z-).
struct PairJet {
  double first = 0.0;
  double second = 0.0;
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();

  // Q_i, the guiding trace.  Invariant under the orthogonal chart change.
  double trace() const { return jacobian.trace(); }
};

// Primitives of Q along each pseudo-Euclidean axis, needed by the equivalent
// Lagrangians that differ from the standard one by a total derivative.
struct GaugePrimitives {
  std::function<Jet2(double z_plus, double z_minus)> along_minus;  // int Q dz-
  std::function<Jet2(double z_plus, double z_minus)> along_plus;   // int Q dz+
};

struct PairGainProfile {
  using Evaluator = std::function<PairJet(double, double)>;

  Chart chart = Chart::x;
  Evaluator evaluate;
  std::string description;

  // f = int Q d(non-cyclic coordinate), closed form.  Required for
  // translational models.
  std::function<double(double)> primitive;
  // g(r) and g'(r) for rotational models F+ = z+ g(r), F- = z- g(r).
  std::function<Jet1(double)> radial;
  std::optional<GaugePrimitives> gauge;

  static PairGainProfile in_x(Evaluator f, std::string description = {});
  static PairGainProfile in_z(Evaluator f, std::string description = {});

  PairJet at_x(double x_odd, double x_even) const;
  PairJet at_z(double z_plus, double z_minus) const;
};

// Scalar potential with analytic gradient.  eval returns V and writes dV/dq
// into grad (same length as q) in the potential's own chart.
struct Potential {
  using Evaluator = std::function<double(std::span<const double> q, std::span<double> grad)>;

  Chart chart = Chart::x;
  Evaluator eval;
  std::string description;
};

struct SystemSpec {
  std::string name;
  int pairs = 0;
  double gamma = 0.0;
  std::vector<PairGainProfile> profiles;
  Potential potential;
  Symmetry symmetry = Symmetry::none;
  CyclicCoordinate cyclic = CyclicCoordinate::z_plus;

  int dof() const { return 2 * pairs; }

  // Throws SpecError on structural problems.
  void validate() const;
};

// Evaluate V and its gradient in the requested chart (x or z).  Throws
// DomainError for the polar chart.
double potential_in(const SystemSpec& spec, Chart chart, std::span<const double> q,
                    std::span<double> grad);

// State in one chart: positions q and velocities v, both of length 2m.  For
// the polar chart the pair layout is (r_i, theta_i).
struct PhaseState {
  double t = 0.0;
  Chart chart = Chart::x;
  std::vector<double> q;
  std::vector<double> v;
};

// Canonical coordinates q and conjugate momenta p.
struct CanonicalState {
  double t = 0.0;
  Chart chart = Chart::x;
  std::vector<double> q;
  std::vector<double> p;
};

}  // namespace lossgain
