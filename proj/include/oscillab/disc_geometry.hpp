// Pointwise geometry of the unit disc: automorphisms, the pseudo-hyperbolic
// and hyperbolic metrics, the Poisson kernel and boundary arcs.
#pragma once

#include <complex>
#include <numbers>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace oscillab {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBoundaryTolerance = 1e-12;
inline constexpr double kDefaultTauCap = 50.0;

/// A point of the closed disc. Interior points satisfy |z| < 1 strictly;
/// boundary points are renormalized to modulus exactly one on construction.
class DiscPoint {
 public:
  static DiscPoint interior(Complex z);
  static DiscPoint boundary(Complex z);
  /// Interior if |z| < 1, boundary if within tolerance of the circle.
  static DiscPoint classify(Complex z);

  Complex value() const { return value_; }
  bool on_boundary() const { return on_boundary_; }
  double modulus() const { return std::abs(value_); }

 private:
  DiscPoint(Complex z, bool on_boundary) : value_(z), on_boundary_(on_boundary) {}
  Complex value_;
  bool on_boundary_;
};

// Raw complex kernels used inside quadrature loops. Callers guarantee the
// preconditions of the DiscPoint overloads below.

/// sigma_a(z) = (a - z) / (1 - conj(a) z).
inline Complex moebius(Complex a, Complex z) { return (a - z) / (1.0 - std::conj(a) * z); }

inline double pseudo_hyperbolic(Complex z, Complex w) {
  const double num = std::abs(z - w);
  if (num == 0.0) return 0.0;
  const double den = std::abs(1.0 - std::conj(w) * z);
  if (den == 0.0) return 1.0;
  const double r = num / den;
  return r > 1.0 ? 1.0 : r;
}

inline double poisson_kernel(Complex a, Complex zeta) {
  return (1.0 - std::norm(a)) / std::norm(zeta - a);
}

/// Hyperbolic distance from rho; +inf when rho == 1.
double hyperbolic_from_rho(double rho);

/// The automorphism sigma_a, parameterized by its a-point.
class Automorphism {
 public:
  explicit Automorphism(DiscPoint a);
  DiscPoint a() const { return a_; }
  DiscPoint operator()(DiscPoint z) const;
  Complex operator()(Complex z) const { return moebius(a_.value(), z); }

 private:
  DiscPoint a_;
};

DiscPoint moebius_eval(DiscPoint a, DiscPoint z);
double pseudo_hyperbolic(DiscPoint z, DiscPoint w);
/// tau = atanh(rho); +inf for distinct points at pseudo-hyperbolic distance 1.
double hyperbolic(DiscPoint z, DiscPoint w);
double poisson_kernel(DiscPoint a, DiscPoint zeta);

struct CappedValue {
  double value;
  bool clipped;
};

/// tau(z, w) clipped to `cap`; `clipped` records whether the cap was active.
inline CappedValue capped_hyperbolic(Complex z, Complex w, double cap) {
  const double t = hyperbolic_from_rho(pseudo_hyperbolic(z, w));
  if (t > cap) return {cap, true};
  return {t, false};
}

/// Largest c with tau >= c rho^2 on [0, 1]: the minimum of atanh(r)/r^2.
/// Returns (c, argmin r).
std::pair<double, double> tau_rho_squared_constant();

/// Closed boundary arc with centre and normalized length in exact turns.
struct Arc {
  Rational center;  // in [0, 1)
  Rational length;  // in (0, 1]

  double center_radians() const;
  double length_value() const;
  /// Angle (radians) of the point at relative position s in [-1/2, 1/2].
  double angle_at(double s) const;
  bool contains(Complex zeta) const;
};

Arc make_arc(Rational center, Rational length);

/// I(r e^{i theta}): midpoint angle theta, length 1 - r.
Arc arc_of(DiscPoint a);
/// The unique a with I(a) = arc.
DiscPoint center_of(const Arc& arc);

/// Angle of z in turns, reduced to [0, 1).
double turns_of(Complex z);

}  // namespace oscillab
