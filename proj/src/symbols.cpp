#include "oscillab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

namespace oscillab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Complex ipow(Complex z, int n) {
  Complex result = 1.0;
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

std::vector<Complex> poly_mul(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  std::vector<Complex> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

void poly_add_into(std::vector<Complex>& acc, const std::vector<Complex>& p, Complex w) {
  if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i] += w * p[i];
}

Complex json_complex(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw SymbolError("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

std::string fmt_complex(Complex z) {
  if (z.imag() == 0.0) return fmt::format("{}", z.real());
  return fmt::format("({}{:+}i)", z.real(), z.imag());
}

}  // namespace

Symbol Symbol::constant(Complex c) { return Symbol(std::make_shared<Node>(Node{node::Constant{c}})); }

Symbol Symbol::identity() { return Symbol(std::make_shared<Node>(Node{node::Identity{}})); }

Symbol Symbol::polynomial(std::vector<Complex> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  node::Polynomial p{std::move(coeffs), -1};
  int nonzero = 0, last = 0;
  for (std::size_t k = 0; k < p.coeffs.size(); ++k)
    if (p.coeffs[k] != 0.0) {
      ++nonzero;
      last = static_cast<int>(k);
    }
  if (nonzero == 1) p.monomial = last;
  return Symbol(std::make_shared<Node>(Node{std::move(p)}));
}

Symbol Symbol::moebius(Complex a) {
  if (!(std::abs(a) < 1.0)) throw SymbolError("moebius node requires |a| < 1");
  return Symbol(std::make_shared<Node>(Node{node::Moebius{a}}));
}

Symbol Symbol::blaschke(Complex factor, std::vector<Complex> zeros) {
  if (std::abs(std::abs(factor) - 1.0) > kBoundaryTolerance)
    throw SymbolError("blaschke factor must be unimodular");
  factor /= std::abs(factor);
  for (Complex z : zeros)
    if (!(std::abs(z) < 1.0)) throw SymbolError("blaschke zeros must lie in the open disc");
  return Symbol(std::make_shared<Node>(Node{node::Blaschke{factor, std::move(zeros)}}));
}

Symbol Symbol::compose(const Symbol& outer, const Symbol& inner) {
  return Symbol(std::make_shared<Node>(Node{node::Compose{outer, inner}}));
}

Symbol Symbol::scale(double r, const Symbol& inner) {
  if (!(r > 0.0 && r <= 1.0)) throw SymbolError("scale factor must lie in (0, 1]");
  return Symbol(std::make_shared<Node>(Node{node::Scale{r, inner}}));
}

Symbol Symbol::sum(std::vector<std::pair<Complex, Symbol>> terms, Complex offset) {
  return Symbol(std::make_shared<Node>(Node{node::Sum{std::move(terms), offset}}));
}

Symbol Symbol::power(const Symbol& inner, int n) {
  if (n < 0) throw SymbolError("negative power");
  std::vector<Complex> mono(static_cast<std::size_t>(n) + 1, 0.0);
  mono.back() = 1.0;
  // Evaluation goes through the monomial fast path; as_polynomial() still
  // expands exactly when inner is polynomial.
  return compose(polynomial(std::move(mono)), inner);
}

Complex Symbol::operator()(Complex z) const {
  return std::visit(
      Overloaded{
          [](const node::Constant& n) { return n.c; },
          [&](const node::Identity&) { return z; },
          [&](const node::Polynomial& n) {
            if (n.monomial >= 0) return n.coeffs[static_cast<std::size_t>(n.monomial)] * ipow(z, n.monomial);
            Complex acc = 0.0;
            for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it) acc = acc * z + *it;
            return acc;
          },
          [&](const node::Moebius& n) { return oscillab::moebius(n.a, z); },
          [&](const node::Blaschke& n) {
            Complex acc = n.factor;
            for (Complex a : n.zeros) acc *= (z - a) / (1.0 - std::conj(a) * z);
            return acc;
          },
          [&](const node::Compose& n) { return n.outer(n.inner(z)); },
          [&](const node::Scale& n) { return n.r * n.inner(z); },
          [&](const node::Sum& n) {
            Complex acc = n.offset;
            for (const auto& [w, s] : n.terms) acc += w * s(z);
            return acc;
          },
      },
      node_->v);
}

std::optional<std::vector<Complex>> Symbol::as_polynomial() const {
  using Poly = std::optional<std::vector<Complex>>;
  return std::visit(
      Overloaded{
          [](const node::Constant& n) -> Poly { return std::vector<Complex>{n.c}; },
          [](const node::Identity&) -> Poly { return std::vector<Complex>{0.0, 1.0}; },
          [](const node::Polynomial& n) -> Poly { return n.coeffs; },
          [](const node::Moebius&) -> Poly { return std::nullopt; },
          [](const node::Blaschke& n) -> Poly {
            // only the zero-free case z -> factor * z^k with all zeros at 0
            for (Complex a : n.zeros)
              if (a != 0.0) return std::nullopt;
            std::vector<Complex> c(n.zeros.size() + 1, 0.0);
            c.back() = n.factor;
            return c;
          },
          [](const node::Compose& n) -> Poly {
            auto outer = n.outer.as_polynomial();
            if (!outer) return std::nullopt;
            auto inner = n.inner.as_polynomial();
            if (!inner) return std::nullopt;
            std::vector<Complex> acc{outer->back()};
            for (auto it = std::next(outer->rbegin()); it != outer->rend(); ++it) {
              acc = poly_mul(acc, *inner);
              acc[0] += *it;
            }
            return acc;
          },
          [](const node::Scale& n) -> Poly {
            auto p = n.inner.as_polynomial();
            if (!p) return std::nullopt;
            for (auto& c : *p) c *= n.r;
            return p;
          },
          [](const node::Sum& n) -> Poly {
            std::vector<Complex> acc{n.offset};
            for (const auto& [w, s] : n.terms) {
              auto p = s.as_polynomial();
              if (!p) return std::nullopt;
              poly_add_into(acc, *p, w);
            }
            return acc;
          },
      },
      node_->v);
}

std::string Symbol::describe() const {
  return std::visit(
      Overloaded{
          [](const node::Constant& n) { return fmt_complex(n.c); },
          [](const node::Identity&) { return std::string("z"); },
          [](const node::Polynomial& n) {
            std::string s;
            for (std::size_t k = 0; k < n.coeffs.size(); ++k) {
              if (n.coeffs[k] == 0.0) continue;
              if (!s.empty()) s += " + ";
              s += fmt_complex(n.coeffs[k]);
              if (k == 1) s += "z";
              if (k > 1) s += fmt::format("z^{}", k);
            }
            return s.empty() ? std::string("0") : s;
          },
          [](const node::Moebius& n) { return fmt::format("sigma[{}]", fmt_complex(n.a)); },
          [](const node::Blaschke& n) {
            std::string s = fmt::format("B[{};", fmt_complex(n.factor));
            for (Complex a : n.zeros) s += " " + fmt_complex(a);
            return s + "]";
          },
          [](const node::Compose& n) { return fmt::format("{} o ({})", n.outer.describe(), n.inner.describe()); },
          [](const node::Scale& n) { return fmt::format("{}*({})", n.r, n.inner.describe()); },
          [](const node::Sum& n) {
            std::string s = fmt_complex(n.offset);
            for (const auto& [w, f] : n.terms) s += fmt::format(" + {}*({})", fmt_complex(w), f.describe());
            return s;
          },
      },
      node_->v);
}

nlohmann::json Symbol::to_json() const {
  using nlohmann::json;
  return std::visit(
      Overloaded{
          [](const node::Constant& n) { return json{{"kind", "const"}, {"value", complex_json(n.c)}}; },
          [](const node::Identity&) { return json{{"kind", "identity"}}; },
          [](const node::Polynomial& n) {
            json c = json::array();
            for (Complex z : n.coeffs) c.push_back(complex_json(z));
            return json{{"kind", "poly"}, {"coeffs", c}};
          },
          [](const node::Moebius& n) { return json{{"kind", "moebius"}, {"a", complex_json(n.a)}}; },
          [](const node::Blaschke& n) {
            json z = json::array();
            for (Complex a : n.zeros) z.push_back(complex_json(a));
            return json{{"kind", "blaschke"}, {"factor", complex_json(n.factor)}, {"zeros", z}};
          },
          [](const node::Compose& n) {
            return json{{"kind", "compose"}, {"outer", n.outer.to_json()}, {"inner", n.inner.to_json()}};
          },
          [](const node::Scale& n) { return json{{"kind", "scale"}, {"r", n.r}, {"inner", n.inner.to_json()}}; },
          [](const node::Sum& n) {
            json t = json::array();
            for (const auto& [w, s] : n.terms) t.push_back(json{{"weight", complex_json(w)}, {"symbol", s.to_json()}});
            return json{{"kind", "sum"}, {"offset", complex_json(n.offset)}, {"terms", t}};
          },
      },
      node_->v);
}

Symbol Symbol::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw SymbolError("symbol description needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "const") return constant(json_complex(j.at("value")));
    if (kind == "identity") return identity();
    if (kind == "poly") {
      std::vector<Complex> c;
      for (const auto& e : j.at("coeffs")) c.push_back(json_complex(e));
      return polynomial(std::move(c));
    }
    if (kind == "moebius") return moebius(json_complex(j.at("a")));
    if (kind == "blaschke") {
      std::vector<Complex> z;
      for (const auto& e : j.value("zeros", nlohmann::json::array())) z.push_back(json_complex(e));
      return blaschke(j.contains("factor") ? json_complex(j.at("factor")) : Complex(1.0), std::move(z));
    }
    if (kind == "compose") return compose(from_json(j.at("outer")), from_json(j.at("inner")));
    if (kind == "scale") return scale(j.at("r").get<double>(), from_json(j.at("inner")));
    if (kind == "sum") {
      std::vector<std::pair<Complex, Symbol>> terms;
      for (const auto& t : j.at("terms")) terms.emplace_back(json_complex(t.at("weight")), from_json(t.at("symbol")));
      return sum(std::move(terms), j.contains("offset") ? json_complex(j.at("offset")) : Complex(0.0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SymbolError(fmt::format("malformed {} symbol: {}", kind, e.what()));
  }
  throw SymbolError(fmt::format("unknown symbol kind \"{}\"", kind));
}

NotASelfMap::NotASelfMap(Complex w, double m)
    : std::invalid_argument(fmt::format("not a self-map of the disc: |phi| = {:.12g} at z = {}", m, fmt_complex(w))),
      witness(w),
      modulus(m) {}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<Complex> sample_circle(const Symbol& f, std::size_t n) {
  if (!is_power_of_two(n)) throw std::invalid_argument(fmt::format("grid size {} is not a power of two", n));
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = f(std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n)));
  return out;
}

SelfMapCertificate validate_self_map(const Symbol& phi, std::size_t n) {
  const auto samples = sample_circle(phi, n);
  SelfMapCertificate cert{SelfMapClass::strict, 0.0, n, {}};
  std::size_t argmax = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double m = std::abs(samples[j]);
    if (!std::isfinite(m)) throw NotASelfMap(std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n)), m);
    if (m > cert.sup_modulus) {
      cert.sup_modulus = m;
      argmax = j;
    }
  }
  auto zeta = [&](std::size_t j) { return std::polar(1.0, kTwoPi * static_cast<double>(j) / static_cast<double>(n)); };
  if (cert.sup_modulus > 1.0 + kValidationMargin) throw NotASelfMap(zeta(argmax), cert.sup_modulus);
  if (cert.sup_modulus >= 1.0 - kTouchThreshold) {
    cert.kind = SelfMapClass::boundary_touching;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(samples[j]) >= 1.0 - kTouchThreshold) cert.contacts.push_back(zeta(j));
  }
  return cert;
}

SelfMap::SelfMap(Symbol phi) : phi_(std::move(phi)), cert_(validate_self_map(phi_)) {}

DiscPoint eval(const SelfMap& phi, DiscPoint z) {
  const Complex w = phi(z.value());
  const double m = std::abs(w);
  if (m > 1.0 + 1e-10) throw NotASelfMap(z.value(), m);
  if (m >= 1.0 - kBoundaryTolerance) return DiscPoint::boundary(w / m);
  return DiscPoint::interior(w);
}

SelfMap compose(const SelfMap& outer, const SelfMap& inner) {
  return SelfMap(Symbol::compose(outer.symbol(), inner.symbol()));
}

BoundaryGrid boundary_samples(const SelfMap& phi, std::size_t n) {
  if (!is_power_of_two(n) || n < 64)
    throw std::invalid_argument(fmt::format("boundary grid needs a power of two N >= 64, got {}", n));
  BoundaryGrid g{sample_circle(phi.symbol(), n)};
  for (Complex& v : g.values) {
    const double m = std::abs(v);
    if (m > 1.0 + 1e-10) throw NotASelfMap(0.0, m);
  }
  return g;
}

std::vector<Complex> dft_coefficients(const std::vector<Complex>& samples) {
  static std::mutex planner_mutex;
  const int n = static_cast<int>(samples.size());
  std::vector<Complex> out(samples.size());
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(samples.data()));
  auto* res = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_1d(n, in, res, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (Complex& c : out) c *= scale;
  return out;
}

std::vector<Complex> taylor(const Symbol& f, int order, std::size_t n) {
  if (order < 0) throw std::invalid_argument("negative Taylor order");
  const auto m = static_cast<std::size_t>(order) + 1;
  if (auto p = f.as_polynomial()) {
    p->resize(m, 0.0);
    return *p;
  }
  if (n == 0) {
    n = kDefaultTaylorGrid;
    while (n < 4 * m) n *= 2;
  }
  if (!is_power_of_two(n)) throw std::invalid_argument(fmt::format("grid size {} is not a power of two", n));
  if (n < 4 * m)
    throw std::invalid_argument(fmt::format("grid of {} samples is too coarse for order {} (need >= {})", n, order, 4 * m));
  auto c = dft_coefficients(sample_circle(f, n));
  c.resize(m);
  return c;
}

}  // namespace oscillab
