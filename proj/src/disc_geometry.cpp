#include "oscillab/disc_geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace oscillab {

DiscPoint DiscPoint::interior(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) >= 1.0)
    throw std::invalid_argument(fmt::format("interior point requires |z| < 1, got |z| = {}", std::abs(z)));
  return DiscPoint(z, false);
}

DiscPoint DiscPoint::boundary(Complex z) {
  const double m = std::abs(z);
  if (!(std::abs(m - 1.0) <= kBoundaryTolerance))
    throw std::invalid_argument(fmt::format("boundary point requires |z| = 1, got |z| = {}", m));
  return DiscPoint(z / m, true);
}

DiscPoint DiscPoint::classify(Complex z) {
  const double m = std::abs(z);
  if (std::abs(m - 1.0) <= kBoundaryTolerance) return boundary(z);
  return interior(z);
}

double hyperbolic_from_rho(double rho) {
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  return std::atanh(rho);
}

Automorphism::Automorphism(DiscPoint a) : a_(a) {
  if (a.on_boundary()) throw std::invalid_argument("automorphism parameter must be interior");
}

DiscPoint Automorphism::operator()(DiscPoint z) const { return moebius_eval(a_, z); }

DiscPoint moebius_eval(DiscPoint a, DiscPoint z) {
  if (a.on_boundary()) throw std::invalid_argument("moebius_eval requires |a| < 1");
  const Complex w = moebius(a.value(), z.value());
  if (z.on_boundary()) return DiscPoint::boundary(w / std::abs(w));
  // Rounding can push an interior image onto the circle only for |z| within ulps of 1.
  if (std::abs(w) >= 1.0) return DiscPoint::boundary(w / std::abs(w));
  return DiscPoint::interior(w);
}

double pseudo_hyperbolic(DiscPoint z, DiscPoint w) {
  if (z.value() == w.value()) return 0.0;
  if (z.on_boundary() && w.on_boundary()) return 1.0;
  return pseudo_hyperbolic(z.value(), w.value());
}

double hyperbolic(DiscPoint z, DiscPoint w) {
  if (z.value() == w.value()) return 0.0;
  if (z.on_boundary() || w.on_boundary()) return std::numeric_limits<double>::infinity();
  return hyperbolic_from_rho(pseudo_hyperbolic(z, w));
}

double poisson_kernel(DiscPoint a, DiscPoint zeta) {
  if (a.on_boundary()) throw std::invalid_argument("Poisson kernel requires |a| < 1");
  if (!zeta.on_boundary()) throw std::invalid_argument("Poisson kernel requires |zeta| = 1");
  return poisson_kernel(a.value(), zeta.value());
}

std::pair<double, double> tau_rho_squared_constant() {
  // atanh(r)/r^2 is convex on (0, 1); golden-section search.
  auto f = [](double r) { return std::atanh(r) / (r * r); };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.05, hi = 0.999;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = f(x2);
    }
  }
  const double r = 0.5 * (lo + hi);
  return {f(r), r};
}

double turns_of(Complex z) {
  double t = std::arg(z) / kTwoPi;
  if (t < 0.0) t += 1.0;
  if (t >= 1.0) t -= 1.0;
  return t;
}

Arc make_arc(Rational center, Rational length) {
  if (length <= 0 || length > 1) throw std::invalid_argument("arc length must lie in (0, 1]");
  if (center < 0 || center >= 1) {
    // reduce modulo one turn
    const Rational whole = Rational(boost::multiprecision::numerator(center) /
                                    boost::multiprecision::denominator(center));
    center -= whole;
    if (center < 0) center += 1;
  }
  return Arc{std::move(center), std::move(length)};
}

double Arc::center_radians() const { return kTwoPi * center.convert_to<double>(); }
double Arc::length_value() const { return length.convert_to<double>(); }

double Arc::angle_at(double s) const { return center_radians() + kTwoPi * s * length_value(); }

bool Arc::contains(Complex zeta) const {
  const double len = length_value();
  if (len >= 1.0) return true;
  double d = turns_of(zeta) - center.convert_to<double>();
  d -= std::round(d);
  return std::abs(d) <= 0.5 * len;
}

Arc arc_of(DiscPoint a) {
  if (a.on_boundary()) throw std::invalid_argument("arc_of requires an interior point");
  const double r = a.modulus();
  const Rational center = r == 0.0 ? Rational(0) : Rational(turns_of(a.value()));
  return make_arc(center, Rational(1) - Rational(r));
}

DiscPoint center_of(const Arc& arc) {
  const double r = (Rational(1) - arc.length).convert_to<double>();
  return DiscPoint::interior(std::polar(r, arc.center_radians()));
}

}  // namespace oscillab
