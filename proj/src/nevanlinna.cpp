#include "oscillab/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace oscillab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Poly = std::vector<Complex>;

Poly mul(const Poly& p, const Poly& q) {
  Poly r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

void add_into(Poly& acc, const Poly& p, Complex w = 1.0) {
  if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i] += w * p[i];
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

Complex horner(const Poly& p, Complex z) {
  Complex acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex horner_derivative(const Poly& p, Complex z) {
  Complex acc = 0.0;
  for (std::size_t k = p.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * p[k];
  return acc;
}

Poly power(const Poly& p, int k) {
  Poly r{1.0};
  for (int i = 0; i < k; ++i) r = mul(r, p);
  return r;
}

void check_degree(const RationalForm& r) {
  if (r.num_degree() > kMaxRationalDegree || r.den_degree() > kMaxRationalDegree)
    throw DegreeBoundExceeded(
        fmt::format("rational lowering exceeds degree {} ({}/{})", kMaxRationalDegree, r.num_degree(), r.den_degree()));
}

RationalForm lower(const Symbol& phi);

RationalForm lower_compose(const RationalForm& outer, const RationalForm& inner) {
  const int m = std::max(outer.num_degree(), outer.den_degree());
  if (m * std::max(inner.num_degree(), inner.den_degree()) > kMaxRationalDegree)
    throw DegreeBoundExceeded(fmt::format("composition exceeds degree {}", kMaxRationalDegree));
  std::vector<Poly> pk(static_cast<std::size_t>(m) + 1), qk(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    pk[static_cast<std::size_t>(k)] = power(inner.num, k);
    qk[static_cast<std::size_t>(k)] = power(inner.den, k);
  }
  RationalForm out{{0.0}, {0.0}};
  auto expand = [&](const Poly& c, Poly& acc) {
    for (std::size_t k = 0; k < c.size(); ++k)
      add_into(acc, mul(pk[k], qk[static_cast<std::size_t>(m) - k]), c[k]);
  };
  expand(outer.num, out.num);
  expand(outer.den, out.den);
  trim(out.num);
  trim(out.den);
  return out;
}

RationalForm lower(const Symbol& phi) {
  RationalForm r = std::visit(
      Overloaded{
          [](const node::Constant& n) { return RationalForm{{n.c}, {1.0}}; },
          [](const node::Identity&) { return RationalForm{{0.0, 1.0}, {1.0}}; },
          [](const node::Polynomial& n) { return RationalForm{n.coeffs, {1.0}}; },
          [](const node::Moebius& n) { return RationalForm{{n.a, -1.0}, {1.0, -std::conj(n.a)}}; },
          [](const node::Blaschke& n) {
            RationalForm b{{n.factor}, {1.0}};
            for (Complex a : n.zeros) {
              b.num = mul(b.num, {-a, 1.0});
              b.den = mul(b.den, {1.0, -std::conj(a)});
            }
            return b;
          },
          [](const node::Compose& n) { return lower_compose(lower(n.outer), lower(n.inner)); },
          [](const node::Scale& n) {
            RationalForm b = lower(n.inner);
            for (Complex& c : b.num) c *= n.r;
            return b;
          },
          [](const node::Sum& n) {
            std::vector<RationalForm> parts;
            for (const auto& t : n.terms) parts.push_back(lower(t.second));
            Poly den{1.0};
            for (const auto& p : parts) den = mul(den, p.den);
            Poly num;
            add_into(num, den, n.offset);
            for (std::size_t i = 0; i < parts.size(); ++i) {
              Poly others{1.0};
              for (std::size_t j = 0; j < parts.size(); ++j)
                if (j != i) others = mul(others, parts[j].den);
              add_into(num, mul(parts[i].num, others), n.terms[i].first);
            }
            return RationalForm{num, den};
          },
      },
      phi.node().v);
  trim(r.num);
  trim(r.den);
  check_degree(r);
  return r;
}

}  // namespace

Complex RationalForm::operator()(Complex z) const { return horner(num, z) / horner(den, z); }

std::vector<Complex> RationalForm::taylor(std::size_t count) const {
  std::vector<Complex> c(count, 0.0);
  const Complex q0 = den.front();
  for (std::size_t k = 0; k < count; ++k) {
    Complex acc = k < num.size() ? num[k] : 0.0;
    const std::size_t top = std::min(k, den.size() - 1);
    for (std::size_t j = 1; j <= top; ++j) acc -= den[j] * c[k - j];
    c[k] = acc / q0;
  }
  return c;
}

SeriesEnergy series_energy(const RationalForm& f, double tail_tol, std::size_t max_terms) {
  const std::size_t d = f.den.size() - 1;
  if (d == 0) {
    double e = 0.0;
    for (Complex c : f.num) e += std::norm(c / f.den.front());
    return {e, f.num.size(), 0.0};
  }
  double nearest = std::numeric_limits<double>::infinity();
  for (Complex z : polynomial_roots(f.den)) nearest = std::min(nearest, std::abs(z));
  const double ratio2 = 1.0 / (nearest * nearest);  // |c_k|^2 decays like ratio2^k
  std::vector<Complex> ring(d, 0.0);                // c_{k-1}, ..., c_{k-d}
  const Complex q0 = f.den.front();
  double total = 0.0;
  std::size_t k = 0, block_end = 64;
  double tail = std::numeric_limits<double>::infinity();
  while (true) {
    double block = 0.0;
    for (; k < block_end; ++k) {
      Complex acc = k < f.num.size() ? f.num[k] : 0.0;
      for (std::size_t j = 1; j <= d; ++j) acc -= f.den[j] * ring[(k + d - j) % d];
      const Complex c = acc / q0;
      ring[k % d] = c;
      block += std::norm(c);
    }
    total += block;
    // A block [M, 2M) of a geometric series is followed by a remainder of
    // block * rho / (1 - rho), rho = ratio2^M.
    const double rho = std::pow(ratio2, static_cast<double>(block_end / 2));
    tail = rho < 1.0 ? block * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    if (k >= f.num.size() && tail < tail_tol) break;
    if (2 * block_end > max_terms) break;
    block_end *= 2;
  }
  return {total, k, tail};
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs) {
  Poly p = coeffs;
  double scale = 0.0;
  for (Complex c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw std::invalid_argument("roots of the zero polynomial");
  // Leading coefficients at rounding level correspond to roots near infinity.
  while (p.size() > 1 && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
  const std::size_t n = p.size() - 1;
  if (n == 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -p[i] / p[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> roots(solver.eigenvalues().begin(), solver.eigenvalues().end());
  for (Complex& z : roots) {
    for (int it = 0; it < 4; ++it) {
      const Complex f = horner(p, z);
      const Complex df = horner_derivative(p, z);
      if (df == 0.0) break;
      const Complex candidate = z - f / df;
      if (std::abs(horner(p, candidate)) < std::abs(f))
        z = candidate;
      else
        break;
    }
  }
  return roots;
}

PreimageSet preimages(const RationalForm& psi, Complex w) {
  Poly p = psi.num;
  add_into(p, psi.den, -w);
  trim(p);
  PreimageSet out;
  double scale = 0.0;
  for (Complex c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw std::invalid_argument("psi is identically equal to w");
  auto roots = polynomial_roots(p);
  // lexicographic order keeps clustering deterministic
  std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
    return std::pair(x.real(), x.imag()) < std::pair(y.real(), y.imag());
  });
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    Complex sum = roots[i];
    int mult = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (!used[j] && std::abs(roots[j] - roots[i]) < kClusterRadius) {
        used[j] = true;
        sum += roots[j];
        ++mult;
      }
    const Complex z = sum / static_cast<double>(mult);
    const double m = std::abs(z);
    if (std::abs(m - 1.0) < kBoundaryAmbiguity) out.boundary_ambiguous = true;
    if (m < 1.0) out.roots.push_back({z, mult});
  }
  return out;
}

CountingValue counting_function(const RationalForm& psi, Complex w) {
  const double m = std::abs(w);
  if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("counting function requires 0 < |w| < 1");
  if (std::abs(psi(0.0) - w) == 0.0) throw std::invalid_argument("counting function requires w != psi(0)");
  const auto pre = preimages(psi, w);
  double total = 0.0;
  for (const auto& r : pre.roots) total += r.multiplicity * -std::log(std::abs(r.z));
  return {total, pre.boundary_ambiguous};
}

std::vector<Complex> default_w_grid(int angles) {
  std::vector<double> radii;
  for (int k = 1; k <= 8; ++k) {
    radii.push_back(std::ldexp(1.0, -k));
    radii.push_back(1.0 - std::ldexp(1.0, -k));
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::vector<Complex> grid;
  for (double r : radii)
    for (int j = 0; j < angles; ++j) grid.push_back(std::polar(r, kTwoPi * j / angles));
  return grid;
}

RationalForm normalized_composite(const SelfMap& phi, Complex a) {
  const Complex pa = phi(a);
  const Symbol composite = Symbol::compose(Symbol::moebius(pa), Symbol::compose(phi.symbol(), Symbol::moebius(a)));
  return to_rational(composite);
}

S1Value s1_statistic(const RationalForm& composite, const std::vector<Complex>& w_grid) {
  if (w_grid.empty()) throw std::invalid_argument("empty w grid");
  S1Value best{-1.0, 0.0, false};
  auto better = [](double v, Complex w, const S1Value& b) {
    if (v != b.value) return v > b.value;
    return std::pair(std::abs(w), std::arg(w)) < std::pair(std::abs(b.argmax), std::arg(b.argmax));
  };
  auto consider = [&](Complex w) {
    if (!(std::abs(w) > 0.0 && std::abs(w) < 1.0)) return;
    if (std::abs(composite(0.0) - w) == 0.0) return;
    const auto n = counting_function(composite, w);
    if (n.boundary_ambiguous) best.flagged = true;
    const double v = std::norm(w) * n.value;
    if (better(v, w, best)) {
      best.value = v;
      best.argmax = w;
    }
  };
  for (Complex w : w_grid) consider(w);

  // radial step: half the smallest gap to a neighbouring grid radius
  std::vector<double> radii;
  for (Complex w : w_grid) radii.push_back(std::abs(w));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  const double r0 = std::abs(best.argmax);
  double hr = 0.5;
  for (double r : radii)
    if (r != r0) hr = std::min(hr, 0.5 * std::abs(r - r0));
  double ht = std::numbers::pi / 32.0;
  for (int round = 0; round < kS1RefineRounds; ++round) {
    const double rc = std::abs(best.argmax), tc = std::arg(best.argmax);
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const double r = rc + i * hr;
        if (r <= 0.0 || r >= 1.0) continue;
        consider(std::polar(r, tc + j * ht));
      }
    hr *= 0.5;
    ht *= 0.5;
  }
  if (best.value < 0.0) best.value = 0.0;
  return best;
}

S1Value s1_statistic(const SelfMap& phi, Complex a, const std::vector<Complex>& w_grid) {
  return s1_statistic(normalized_composite(phi, a), w_grid);
}

RationalForm to_rational(const Symbol& phi) {
  RationalForm r = lower(phi);
  if (r.den_degree() > 0) {
    for (Complex z : polynomial_roots(r.den))
      if (std::abs(z) <= 1.0) throw SymbolError(fmt::format("denominator vanishes in the closed disc near |z| = {}", std::abs(z)));
  } else if (r.den.front() == 0.0) {
    throw SymbolError("zero denominator");
  }
  return r;
}

}  // namespace oscillab
