// H^2 norms and the Garsia-type oscillation gamma(f, a) = ||f o sigma_a - f(a)||_{H^2},
// by trapezoidal quadrature on the circle with two independent routes.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscillab/symbols.hpp"

namespace oscillab {

struct QuadratureOptions {
  std::size_t n0 = 4096;
  std::size_t n_max = std::size_t{1} << 20;
  double tol = 1e-8;  // on the square-root scale
  // When false only the Poisson route is evaluated (direct is reported as NaN).
  // Used where transported integrands are under-resolvable.
  bool require_agreement = true;
};

/// Two trapezoidal estimates of a mean over the circle: the direct route on
/// sigma_a-transported samples and the Poisson-weighted change of variable.
struct DualRouteMean {
  double direct;
  double poisson;
  std::size_t n;
  bool converged;
  double residual() const { return std::abs(std::sqrt(std::max(direct, 0.0)) - std::sqrt(std::max(poisson, 0.0))); }
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double direct, double poisson, std::size_t n);
  double direct, poisson;
  std::size_t n;
};

namespace detail {

inline Complex root_of_unity(std::size_t j, std::size_t n) {
  return std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n));
}

inline bool close_on_sqrt_scale(double x, double y, double tol) {
  x = std::max(x, 0.0);
  y = std::max(y, 0.0);
  return std::abs(x - y) <= tol * (std::sqrt(x) + std::sqrt(y)) + 1e-15;
}

}  // namespace detail

/// Doubles N from n0 until each route is self-converged and the routes agree.
/// `direct(zeta)` and `poisson(zeta)` return the two integrands.
template <class Direct, class Poisson>
DualRouteMean dual_route_mean(Direct&& direct, Poisson&& poisson, const QuadratureOptions& opt = {}) {
  std::size_t n = opt.n0;
  double sd = 0.0, sp = 0.0;
  const bool both = opt.require_agreement;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex z = detail::root_of_unity(j, n);
    if (both) sd += direct(z);
    sp += poisson(z);
  }
  double md = sd / static_cast<double>(n), mp = sp / static_cast<double>(n);
  while (true) {
    if (2 * n > opt.n_max) return {both ? md : std::nan(""), mp, n, both && detail::close_on_sqrt_scale(md, mp, opt.tol)};
    const std::size_t m = 2 * n;
    for (std::size_t j = 1; j < m; j += 2) {
      const Complex z = detail::root_of_unity(j, m);
      if (both) sd += direct(z);
      sp += poisson(z);
    }
    const double nd = sd / static_cast<double>(m), np = sp / static_cast<double>(m);
    const bool poisson_settled = detail::close_on_sqrt_scale(np, mp, 0.1 * opt.tol);
    const bool settled = both ? poisson_settled && detail::close_on_sqrt_scale(nd, md, 0.1 * opt.tol) &&
                                                     detail::close_on_sqrt_scale(nd, np, opt.tol)
                                               : poisson_settled;
    md = nd;
    mp = np;
    n = m;
    if (settled) return {both ? md : std::nan(""), mp, n, true};
  }
}

/// Self-converged trapezoidal mean of a single integrand.
template <class F>
double adaptive_mean(F&& f, std::size_t n0 = 4096, double tol = 1e-13, std::size_t n_max = std::size_t{1} << 20) {
  std::size_t n = n0;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += f(detail::root_of_unity(j, n));
  double mean = s / static_cast<double>(n);
  while (2 * n <= n_max) {
    const std::size_t m = 2 * n;
    for (std::size_t j = 1; j < m; j += 2) s += f(detail::root_of_unity(j, m));
    const double next = s / static_cast<double>(m);
    const bool done = std::abs(next - mean) <= tol * std::max(1.0, std::abs(next));
    mean = next;
    n = m;
    if (done) break;
  }
  return mean;
}

double h2_norm(const Symbol& f, std::size_t n0 = 4096);
double h2_norm(const BoundaryGrid& grid);
/// sqrt(mean |v|^2) over raw samples; throws when N < 64.
double h2_norm(const std::vector<Complex>& samples);

/// Both routes of gamma(f, a)^2.
DualRouteMean garsia_gamma_routes(const Symbol& f, Complex a, const QuadratureOptions& opt = {});

/// gamma(f, a); throws QuadratureError when the routes disagree at n_max.
double garsia_gamma(const Symbol& f, Complex a, const QuadratureOptions& opt = {});

/// Geometric radii 1 - 2^{-k}, k = 1..depth, times `angles` equispaced angles,
/// plus the origin.
std::vector<Complex> standard_a_grid(int depth = 12, int angles = 64);

struct SeminormEstimate {
  double value;
  Complex argmax;
  std::size_t grid_points;
  std::string grid;
  bool lower_bound = true;  // a finite grid only bounds the supremum from below
};

SeminormEstimate bmoa_seminorm(const Symbol& f, const std::vector<Complex>& a_grid, const QuadratureOptions& opt = {});

struct ProfilePoint {
  double approach;
  double value;
};

/// Per-radius maxima of gamma(f, a) over |a| = r.
std::vector<ProfilePoint> vmoa_profile(const Symbol& f, const std::vector<double>& radii, int angular_count,
                                       const QuadratureOptions& opt = {});

}  // namespace oscillab
