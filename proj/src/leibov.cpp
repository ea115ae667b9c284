#include "oscillab/leibov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "oscillab/parallel.hpp"

namespace oscillab {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double x) { return std::remainder(x, kTwoPi); }

// Maximizes a unimodal f on [lo, hi] by golden-section search.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-10) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({f1, f2, f(0.5 * (lo + hi))});
}

// 1 - conj(z) w without cancelling the leading unit moduli:
// (1 - e^{i psi}) + (1 - |z||w|) e^{i psi}, psi = arg w - arg z.
Complex one_minus_conj_product(const DeepPoint& z, const DeepPoint& w) {
  const double psi = wrap_angle(w.angle - z.angle);
  const double gap = z.depth + w.depth - z.depth * w.depth;
  return Complex(0.0, -2.0) * std::sin(0.5 * psi) * std::polar(1.0, 0.5 * psi) + gap * std::polar(1.0, psi);
}

}  // namespace

DeepPoint DeepPoint::from(Complex z) {
  const double r = std::abs(z);
  if (!(r < 1.0)) throw std::invalid_argument("deep point must lie inside the disc");
  return {1.0 - r, r == 0.0 ? 0.0 : std::arg(z)};
}

double one_minus_rho_squared(const DeepPoint& a, const DeepPoint& b) {
  const double s = (1.0 - a.depth) * (1.0 - b.depth);
  const double gap = a.depth + b.depth - a.depth * b.depth;
  const double half = std::sin(0.5 * wrap_angle(b.angle - a.angle));
  const double den = gap * gap + 4.0 * s * half * half;
  if (den == 0.0) return 1.0;
  return std::min(1.0, a.one_minus_norm() * b.one_minus_norm() / den);
}

double gamma_closed_form(const DeepPoint& b, const DeepPoint& a) { return std::sqrt(one_minus_rho_squared(a, b)); }

double gamma_closed_form(DiscPoint b, DiscPoint a) {
  if (b.on_boundary() || a.on_boundary()) throw std::invalid_argument("gamma_closed_form needs interior points");
  const Complex av = a.value(), bv = b.value();
  const double v = (1.0 - std::norm(av)) * (1.0 - std::norm(bv)) / std::norm(1.0 - std::conj(bv) * av);
  return std::sqrt(std::min(1.0, v));
}

double circle_max_gamma(const DeepPoint& b, double radius_depth) {
  // The peak in arg a has width about 1 - r|b|; search in u with
  // arg a - arg b = scale * sinh(u) so the tolerance is relative to that width.
  const double scale = std::max(radius_depth + b.depth - radius_depth * b.depth, 1e-300);
  const double umax = std::asinh(kPi / scale);
  const double best = golden_max(
      [&](double u) { return one_minus_rho_squared({radius_depth, b.angle + scale * std::sinh(u)}, b); }, -umax, umax);
  return std::sqrt(best);
}

TestSequence::TestSequence(std::vector<DeepPoint> base) : base_(std::move(base)) {
  for (const auto& p : base_)
    if (!(p.depth > 0.0 && p.depth <= 1.0)) throw std::invalid_argument("test sequence points must be interior");
}

TestSequence TestSequence::dyadic(int count) {
  std::vector<DeepPoint> base;
  for (int n = 1; n <= count; ++n) base.push_back({std::ldexp(1.0, -n), 0.0});
  return TestSequence(std::move(base));
}

Symbol TestSequence::function(std::size_t i) const {
  const Complex b = base_.at(i).value();
  return Symbol::sum({{1.0, Symbol::moebius(b)}}, -b);
}

double TestSequence::h2_norm(std::size_t i) const { return std::sqrt(base_.at(i).one_minus_norm()); }

bool SelectionCertificate::verified() const {
  return std::all_of(steps.begin(), steps.end(), [](const SelectionStep& s) { return s.verified(); });
}

nlohmann::json SelectionCertificate::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& s : steps) {
    arr.push_back({{"k", s.k},
                   {"n", s.index + 1},
                   {"one_minus_r_k", s.radius_depth},
                   {"one_minus_r_next", s.next_radius_depth},
                   {"threshold", s.threshold},
                   {"inner_sup", s.inner_sup},
                   {"outer_sup", s.outer_sup},
                   {"h2_norm", s.h2},
                   {"verified", s.verified()}});
  }
  return {{"depth", steps.size()}, {"verified", verified()}, {"steps", arr}};
}

SelectionCertificate select_subsequence(const TestSequence& seq, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  SelectionCertificate cert;
  double radius = 0.5;  // 1 - r_1
  std::size_t next = 0;
  for (int k = 1; k <= depth; ++k) {
    const double thr = std::ldexp(1.0, -k - 1);
    int inner_fail = 0, norm_fail = 0;
    std::optional<std::size_t> pick;
    double inner = 0.0;
    for (std::size_t i = next; i < seq.size(); ++i) {
      const DeepPoint& b = seq.base(i);
      if (!(b.depth < radius)) {
        ++inner_fail;  // b inside the closed disc |a| <= r_k: gamma reaches 1 there
        continue;
      }
      const double sup = circle_max_gamma(b, radius);
      if (!(sup < thr)) {
        ++inner_fail;
        continue;
      }
      if (!(seq.h2_norm(i) < thr)) {
        ++norm_fail;
        continue;
      }
      pick = i;
      inner = sup;
      break;
    }
    if (!pick)
      throw SelectionError(fmt::format(
          "test sequence exhausted at k = {}: {} candidates miss the bound sup_{{|a|<=r_k}} gamma < 2^-{}, {} miss the "
          "H^2 bound",
          k, inner_fail, k + 1, norm_fail));
    const DeepPoint& b = seq.base(*pick);
    // Smallest r_{k+1} > |b| with sup_{|a| >= r_{k+1}} gamma < thr, by bisection in log(1 - r).
    double bad = std::log(b.depth), good = bad;
    double step = 1.0;
    while (!(circle_max_gamma(b, std::exp(good)) < thr)) {
      good -= step;
      step *= 2.0;
      if (std::exp(good) < 1e-300) throw SelectionError(fmt::format("outer bound unachievable at k = {}", k));
    }
    for (int it = 0; it < 200 && bad - good > 1e-12; ++it) {
      const double mid = 0.5 * (bad + good);
      if (circle_max_gamma(b, std::exp(mid)) < thr)
        good = mid;
      else
        bad = mid;
    }
    const double next_radius = std::exp(good);
    cert.steps.push_back(
        {k, *pick, radius, next_radius, thr, inner, circle_max_gamma(b, next_radius), seq.h2_norm(*pick)});
    radius = next_radius;
    next = *pick + 1;
  }
  return cert;
}

double combination_gamma(const TestSequence& seq, const SelectionCertificate& cert, const std::vector<Complex>& lambda,
                         const DeepPoint& a) {
  // With w_j = 1 - conj(a) b_j and W_jk = 1 - conj(b_j) b_k,
  // gamma^2 = (1 - |a|^2) sum_{j,k} lambda_j conj(lambda_k) (1 - |b_j|^2)(1 - |b_k|^2) / (conj(w_j) w_k W_jk).
  std::vector<const DeepPoint*> b;
  std::vector<Complex> coef, w;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    if (lambda[k] == 0.0) continue;
    b.push_back(&seq.base(cert.steps[k].index));
    coef.push_back(lambda[k]);
    w.push_back(one_minus_conj_product(a, *b.back()));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    total += std::norm(coef[j]) * b[j]->one_minus_norm() / std::norm(w[j]);
    for (std::size_t k = j + 1; k < b.size(); ++k) {
      const Complex g = coef[j] * std::conj(coef[k]) * b[j]->one_minus_norm() * b[k]->one_minus_norm() /
                        (std::conj(w[j]) * w[k] * one_minus_conj_product(*b[j], *b[k]));
      total += 2.0 * g.real();
    }
  }
  return std::sqrt(std::max(total * a.one_minus_norm(), 0.0));
}

std::vector<DeepPoint> augmented_grid(const TestSequence& seq, const SelectionCertificate& cert, int depth,
                                      int angles) {
  std::vector<DeepPoint> grid{{1.0, 0.0}};
  for (int k = 1; k <= depth; ++k)
    for (int j = 0; j < angles; ++j) grid.push_back({std::ldexp(1.0, -k), kTwoPi * j / angles});
  for (const auto& s : cert.steps) grid.push_back(seq.base(s.index));
  return grid;
}

CombinationEstimate combination_seminorm(const TestSequence& seq, const SelectionCertificate& cert,
                                         const std::vector<Complex>& lambda, double tol) {
  if (lambda.size() > cert.steps.size())
    throw std::invalid_argument("coefficient sequence longer than the certificate");
  double sup = 0.0;
  for (Complex l : lambda) sup = std::max(sup, std::abs(l));
  if (!(sup > 0.0)) throw std::invalid_argument("coefficient sequence must be nonzero");
  const auto grid = augmented_grid(seq, cert);
  const auto values = parallel_map(grid.size(), [&](std::size_t i) { return combination_gamma(seq, cert, lambda, grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  CombinationEstimate e{values[best], grid[best], sup, false, false};
  e.lower_ok = e.value >= 0.25 * sup;
  e.upper_ok = e.value <= 2.0 * sup + tol;
  return e;
}

Symbol combination_symbol(const TestSequence& seq, const SelectionCertificate& cert, const std::vector<Complex>& lambda) {
  if (lambda.size() > cert.steps.size())
    throw std::invalid_argument("coefficient sequence longer than the certificate");
  std::vector<std::pair<Complex, Symbol>> terms;
  Complex offset = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    const Complex b = seq.base(cert.steps[k].index).value();
    terms.emplace_back(lambda[k], Symbol::moebius(b));
    offset -= lambda[k] * b;
  }
  return Symbol::sum(std::move(terms), offset);
}

SpikeReport one_spike_check(const TestSequence& seq, const SelectionCertificate& cert,
                            const std::vector<DeepPoint>& grid) {
  SpikeReport r{0, 0.0};
  for (const auto& a : grid) {
    int spikes = 0;
    double sum = 0.0;
    for (const auto& s : cert.steps) {
      const double g = gamma_closed_form(seq.base(s.index), a);
      sum += g;
      if (g >= s.threshold) ++spikes;
    }
    r.max_spikes = std::max(r.max_spikes, spikes);
    r.max_sum = std::max(r.max_sum, sum);
  }
  return r;
}

}  // namespace oscillab
