#include "oscillab/hardy_oscillation.hpp"

#include <fmt/format.h>

#include "oscillab/parallel.hpp"

namespace oscillab {

QuadratureError::QuadratureError(double d, double p, std::size_t grid)
    : std::runtime_error(fmt::format("quadrature routes disagree at N = {}: direct {:.17g}, Poisson {:.17g}", grid,
                                     std::sqrt(std::max(d, 0.0)), std::sqrt(std::max(p, 0.0)))),
      direct(d),
      poisson(p),
      n(grid) {}

double h2_norm(const Symbol& f, std::size_t n0) {
  return std::sqrt(adaptive_mean([&](Complex z) { return std::norm(f(z)); }, n0));
}

double h2_norm(const std::vector<Complex>& samples) {
  if (samples.size() < 64) throw std::invalid_argument("H^2 norm needs at least 64 boundary samples");
  double s = 0.0;
  for (Complex v : samples) s += std::norm(v);
  return std::sqrt(s / static_cast<double>(samples.size()));
}

double h2_norm(const BoundaryGrid& grid) { return h2_norm(grid.values); }

DualRouteMean garsia_gamma_routes(const Symbol& f, Complex a, const QuadratureOptions& opt) {
  if (!(std::abs(a) < 1.0)) throw std::invalid_argument("garsia_gamma requires |a| < 1");
  const Complex fa = f(a);
  return dual_route_mean([&](Complex z) { return std::norm(f(moebius(a, z)) - fa); },
                         [&](Complex z) { return std::norm(f(z) - fa) * poisson_kernel(a, z); }, opt);
}

double garsia_gamma(const Symbol& f, Complex a, const QuadratureOptions& opt) {
  const auto r = garsia_gamma_routes(f, a, opt);
  if (!r.converged) throw QuadratureError(r.direct, r.poisson, r.n);
  return std::sqrt(std::max(r.poisson, 0.0));
}

std::vector<Complex> standard_a_grid(int depth, int angles) {
  std::vector<Complex> grid{0.0};
  for (int k = 1; k <= depth; ++k) {
    const double r = 1.0 - std::ldexp(1.0, -k);
    for (int j = 0; j < angles; ++j) grid.push_back(std::polar(r, kTwoPi * j / angles));
  }
  return grid;
}

SeminormEstimate bmoa_seminorm(const Symbol& f, const std::vector<Complex>& a_grid, const QuadratureOptions& opt) {
  if (a_grid.empty()) throw std::invalid_argument("empty a-grid");
  const auto values = parallel_map(a_grid.size(), [&](std::size_t i) { return garsia_gamma(f, a_grid[i], opt); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return {values[best], a_grid[best], a_grid.size(), fmt::format("{} points", a_grid.size()), true};
}

std::vector<ProfilePoint> vmoa_profile(const Symbol& f, const std::vector<double>& radii, int angular_count,
                                       const QuadratureOptions& opt) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw std::invalid_argument("profile radii must lie in (0, 1)");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw std::invalid_argument("profile radii must increase");
  }
  const std::size_t per = static_cast<std::size_t>(angular_count);
  const auto values = parallel_map(radii.size() * per, [&](std::size_t i) {
    const double r = radii[i / per];
    return garsia_gamma(f, std::polar(r, kTwoPi * static_cast<double>(i % per) / angular_count), opt);
  });
  std::vector<ProfilePoint> out;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double m = 0.0;
    for (std::size_t j = 0; j < per; ++j) m = std::max(m, values[k * per + j]);
    out.push_back({radii[k], m});
  }
  return out;
}

}  // namespace oscillab
